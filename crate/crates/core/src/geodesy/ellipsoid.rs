//! Geodesic inverse and direct problems on an oblate ellipsoid of revolution.
//!
//! The solution follows Karney's formulation (series in the third flattening,
//! expanded to sixth order) with Newton iteration on the starting azimuth and a
//! bisection safeguard. Round-off limited accuracy is on the order of
//! 15 nanometers for WGS84.
#![allow(clippy::excessive_precision, clippy::too_many_arguments)]

use std::f64::consts::PI;
use std::sync::OnceLock;

/// WGS84 semi-major axis in meters.
pub const WGS84_A: f64 = 6378137.0;
/// WGS84 flattening.
pub const WGS84_F: f64 = 1.0 / 298.257223563;

const ORDER: usize = 6;
const N_C3X: usize = 15;

/// Hard cap on inverse iterations. If it is reached, the caller falls back to
/// the meridional path length.
pub const MAX_INVERSE_ITERATIONS: usize = 100;
const NEWTON_ITERATIONS: usize = 20;

const COEFF_A3: [f64; 18] = [
    -3.0, 128.0, -2.0, -3.0, 64.0, -1.0, -3.0, -1.0, 16.0, 3.0, -1.0, -2.0, 8.0, 1.0, -1.0, 2.0,
    1.0, 1.0,
];

const COEFF_C3: [f64; 45] = [
    3.0, 128.0, 2.0, 5.0, 128.0, -1.0, 3.0, 3.0, 64.0, -1.0, 0.0, 1.0, 8.0, -1.0, 1.0, 4.0, 5.0,
    256.0, 1.0, 3.0, 128.0, -3.0, -2.0, 3.0, 64.0, 1.0, -3.0, 2.0, 32.0, 7.0, 512.0, -10.0, 9.0,
    384.0, 5.0, -9.0, 5.0, 192.0, 7.0, 512.0, -14.0, 7.0, 512.0, 21.0, 2560.0,
];

const COEFF_A1M1: [f64; 5] = [1.0, 4.0, 64.0, 0.0, 256.0];

const COEFF_C1: [f64; 18] = [
    -1.0, 6.0, -16.0, 32.0, -9.0, 64.0, -128.0, 2048.0, 9.0, -16.0, 768.0, 3.0, -5.0, 512.0, -7.0,
    1280.0, -7.0, 2048.0,
];

const COEFF_C1P: [f64; 18] = [
    205.0, -432.0, 768.0, 1536.0, 4005.0, -4736.0, 3840.0, 12288.0, -225.0, 116.0, 384.0, -7173.0,
    2695.0, 7680.0, 3467.0, 7680.0, 38081.0, 61440.0,
];

const COEFF_A2M1: [f64; 5] = [-11.0, -28.0, -192.0, 0.0, 256.0];

const COEFF_C2: [f64; 18] = [
    1.0, 2.0, 16.0, 32.0, 35.0, 64.0, 384.0, 2048.0, 15.0, 80.0, 768.0, 7.0, 35.0, 512.0, 63.0,
    1280.0, 77.0, 2048.0,
];

/// Result of the inverse problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inverse {
    /// Geodesic distance in meters.
    pub distance: f64,
    /// Forward azimuth at the first point, degrees clockwise from north.
    pub azi1: f64,
    /// Forward azimuth at the second point, degrees.
    pub azi2: f64,
    /// False when the azimuth iteration hit [`MAX_INVERSE_ITERATIONS`].
    pub converged: bool,
}

/// Result of the direct problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direct {
    pub lat: f64,
    pub lon: f64,
    pub azi: f64,
}

#[derive(Debug, Clone)]
pub struct Ellipsoid {
    a: f64,
    f: f64,
    f1: f64,
    ep2: f64,
    n: f64,
    b: f64,
    etol2: f64,
    a3x: [f64; ORDER],
    c3x: [f64; N_C3X],
}

const TOL0: f64 = f64::EPSILON;
const TOL1: f64 = 200.0 * TOL0;

fn tiny() -> f64 {
    f64::MIN_POSITIVE.sqrt()
}

fn tol2() -> f64 {
    TOL0.sqrt()
}

impl Ellipsoid {
    /// Oblate (or spherical) ellipsoid with semi-major axis `a` and flattening `f`.
    ///
    /// Only `0 <= f < 0.1` is supported.
    pub fn new(a: f64, f: f64) -> Self {
        assert!(a > 0.0 && (0.0..0.1).contains(&f), "unsupported ellipsoid");
        let f1 = 1.0 - f;
        let e2 = f * (2.0 - f);
        let ep2 = e2 / (f1 * f1);
        let n = f / (2.0 - f);
        let b = a * f1;
        let etol2 = 0.1 * tol2() / (f.abs().max(0.001) * (1.0 - f / 2.0).min(1.0) / 2.0).sqrt();

        let mut a3x = [0.0; ORDER];
        let mut o = 0;
        for (k, j) in (0..ORDER).rev().enumerate() {
            let m = j.min(ORDER - j - 1);
            a3x[k] = polyval(m, &COEFF_A3[o..], n) / COEFF_A3[o + m + 1];
            o += m + 2;
        }

        let mut c3x = [0.0; N_C3X];
        let mut o = 0;
        let mut k = 0;
        for l in 1..ORDER {
            for j in (l..ORDER).rev() {
                let m = j.min(ORDER - j - 1);
                c3x[k] = polyval(m, &COEFF_C3[o..], n) / COEFF_C3[o + m + 1];
                k += 1;
                o += m + 2;
            }
        }

        Ellipsoid {
            a,
            f,
            f1,
            ep2,
            n,
            b,
            etol2,
            a3x,
            c3x,
        }
    }

    pub fn wgs84() -> &'static Ellipsoid {
        static WGS84: OnceLock<Ellipsoid> = OnceLock::new();
        WGS84.get_or_init(|| Ellipsoid::new(WGS84_A, WGS84_F))
    }

    pub fn semi_major_axis(&self) -> f64 {
        self.a
    }

    pub fn flattening(&self) -> f64 {
        self.f
    }

    fn a3f(&self, eps: f64) -> f64 {
        polyval(ORDER - 1, &self.a3x, eps)
    }

    fn c3f(&self, eps: f64, c: &mut [f64; ORDER]) {
        let mut mult = 1.0;
        let mut o = 0;
        for l in 1..ORDER {
            let m = ORDER - l - 1;
            mult *= eps;
            c[l] = mult * polyval(m, &self.c3x[o..], eps);
            o += m + 1;
        }
    }

    /// Returns the scaled distance `s12 / b`, the scaled reduced length
    /// `m12 / b` and `m0`.
    fn lengths(
        &self,
        eps: f64,
        sig12: f64,
        ssig1: f64,
        csig1: f64,
        dn1: f64,
        ssig2: f64,
        csig2: f64,
        dn2: f64,
    ) -> (f64, f64, f64) {
        let mut c1a = [0.0; ORDER + 1];
        let mut c2a = [0.0; ORDER + 1];
        let mut a1 = a1m1f(eps);
        c1f(eps, &mut c1a);
        let mut a2 = a2m1f(eps);
        c2f(eps, &mut c2a);
        let m0x = a1 - a2;
        a1 += 1.0;
        a2 += 1.0;
        let b1 = sin_cos_series(true, ssig2, csig2, &c1a) - sin_cos_series(true, ssig1, csig1, &c1a);
        let s12b = a1 * (sig12 + b1);
        let b2 = sin_cos_series(true, ssig2, csig2, &c2a) - sin_cos_series(true, ssig1, csig1, &c2a);
        let j12 = m0x * sig12 + (a1 * b1 - a2 * b2);
        let m12b = dn2 * (csig1 * ssig2) - dn1 * (ssig1 * csig2) - csig1 * csig2 * j12;
        (s12b, m12b, m0x)
    }

    /// Starting guess for the azimuth at point 1. Returns
    /// `(sig12, salp1, calp1, salp2, calp2, dnm)`; `sig12 >= 0` signals that
    /// the short-line approximation is already accurate.
    fn inverse_start(
        &self,
        sbet1: f64,
        cbet1: f64,
        sbet2: f64,
        cbet2: f64,
        lam12: f64,
        slam12: f64,
        clam12: f64,
    ) -> (f64, f64, f64, f64, f64, f64) {
        let mut sig12 = -1.0;
        let mut salp2 = f64::NAN;
        let mut calp2 = f64::NAN;
        let mut dnm = f64::NAN;

        let sbet12 = sbet2 * cbet1 - cbet2 * sbet1;
        let cbet12 = cbet2 * cbet1 + sbet2 * sbet1;
        let sbet12a = sbet2 * cbet1 + cbet2 * sbet1;

        let shortline = cbet12 >= 0.0 && sbet12 < 0.5 && cbet2 * lam12 < 0.5;
        let (mut somg12, mut comg12);
        if shortline {
            let mut sbetm2 = sq(sbet1 + sbet2);
            sbetm2 /= sbetm2 + sq(cbet1 + cbet2);
            dnm = (1.0 + self.ep2 * sbetm2).sqrt();
            let omg12 = lam12 / (self.f1 * dnm);
            somg12 = omg12.sin();
            comg12 = omg12.cos();
        } else {
            somg12 = slam12;
            comg12 = clam12;
        }

        let mut salp1 = cbet2 * somg12;
        let mut calp1 = if comg12 >= 0.0 {
            sbet12 + cbet2 * sbet1 * sq(somg12) / (1.0 + comg12)
        } else {
            sbet12a - cbet2 * sbet1 * sq(somg12) / (1.0 - comg12)
        };

        let ssig12 = salp1.hypot(calp1);
        let csig12 = sbet1 * sbet2 + cbet1 * cbet2 * comg12;

        if shortline && ssig12 < self.etol2 {
            salp2 = cbet1 * somg12;
            calp2 = sbet12
                - cbet1
                    * sbet2
                    * if comg12 >= 0.0 {
                        sq(somg12) / (1.0 + comg12)
                    } else {
                        1.0 - comg12
                    };
            norm2(&mut salp2, &mut calp2);
            sig12 = ssig12.atan2(csig12);
        } else if self.n.abs() > 0.1
            || csig12 >= 0.0
            || ssig12 >= 6.0 * self.n.abs() * PI * sq(cbet1)
        {
            // Zeroth-order spherical approximation is good enough.
        } else {
            // Nearly antipodal: scale to the astroid problem.
            let lam12x = (-slam12).atan2(-clam12);
            let k2 = sq(sbet1) * self.ep2;
            let eps = k2 / (2.0 * (1.0 + (1.0 + k2).sqrt()) + k2);
            let lamscale = self.f * cbet1 * self.a3f(eps) * PI;
            let betscale = lamscale * cbet1;
            let x = lam12x / lamscale;
            let y = sbet12a / betscale;

            if y > -TOL1 && x > -1.0 - 1000.0 * tol2() {
                salp1 = (-x).min(1.0);
                calp1 = -(1.0 - sq(salp1)).sqrt();
            } else {
                let k = astroid(x, y);
                let omg12a = lamscale * (-x * k / (1.0 + k));
                somg12 = omg12a.sin();
                comg12 = -omg12a.cos();
                salp1 = cbet2 * somg12;
                calp1 = sbet12a - cbet2 * sbet1 * sq(somg12) / (1.0 - comg12);
            }
        }

        if salp1 > 0.0 || salp1.is_nan() {
            norm2(&mut salp1, &mut calp1);
        } else {
            salp1 = 1.0;
            calp1 = 0.0;
        }
        (sig12, salp1, calp1, salp2, calp2, dnm)
    }

    /// Longitude difference reached by the geodesic leaving point 1 with the
    /// given azimuth, its derivative, and the auxiliary quantities needed to
    /// finish the solution.
    fn lambda12(
        &self,
        sbet1: f64,
        cbet1: f64,
        dn1: f64,
        sbet2: f64,
        cbet2: f64,
        dn2: f64,
        salp1: f64,
        mut calp1: f64,
        slam120: f64,
        clam120: f64,
        diffp: bool,
    ) -> Lambda {
        if sbet1 == 0.0 && calp1 == 0.0 {
            calp1 = -tiny();
        }
        let salp0 = salp1 * cbet1;
        let calp0 = calp1.hypot(salp1 * sbet1);

        let mut ssig1 = sbet1;
        let somg1 = salp0 * sbet1;
        let mut csig1 = calp1 * cbet1;
        let comg1 = calp1 * cbet1;
        norm2(&mut ssig1, &mut csig1);

        let salp2 = if cbet2 != cbet1 { salp0 / cbet2 } else { salp1 };
        let calp2 = if cbet2 != cbet1 || sbet2.abs() != -sbet1 {
            (sq(calp1 * cbet1)
                + if cbet1 < -sbet1 {
                    (cbet2 - cbet1) * (cbet1 + cbet2)
                } else {
                    (sbet1 - sbet2) * (sbet1 + sbet2)
                })
            .sqrt()
                / cbet2
        } else {
            calp1.abs()
        };
        let mut ssig2 = sbet2;
        let somg2 = salp0 * sbet2;
        let mut csig2 = calp2 * cbet2;
        let comg2 = calp2 * cbet2;
        norm2(&mut ssig2, &mut csig2);

        let sig12 = (csig1 * ssig2 - ssig1 * csig2)
            .max(0.0)
            .atan2(csig1 * csig2 + ssig1 * ssig2);
        let somg12 = (comg1 * somg2 - somg1 * comg2).max(0.0);
        let comg12 = comg1 * comg2 + somg1 * somg2;
        let eta = (somg12 * clam120 - comg12 * slam120).atan2(comg12 * clam120 + somg12 * slam120);

        let k2 = sq(calp0) * self.ep2;
        let eps = k2 / (2.0 * (1.0 + (1.0 + k2).sqrt()) + k2);
        let mut c3a = [0.0; ORDER];
        self.c3f(eps, &mut c3a);
        let b312 = sin_cos_series(true, ssig2, csig2, &c3a) - sin_cos_series(true, ssig1, csig1, &c3a);
        let domg12 = -self.f * self.a3f(eps) * salp0 * (sig12 + b312);
        let lam12 = eta + domg12;

        let dlam12 = if !diffp {
            f64::NAN
        } else if calp2 == 0.0 {
            -2.0 * self.f1 * dn1 / sbet1
        } else {
            let (_, m12b, _) = self.lengths(eps, sig12, ssig1, csig1, dn1, ssig2, csig2, dn2);
            m12b * self.f1 / (calp2 * cbet2)
        };

        Lambda {
            lam12,
            salp2,
            calp2,
            sig12,
            ssig1,
            csig1,
            ssig2,
            csig2,
            eps,
            dlam12,
        }
    }

    /// Solves the inverse problem between two points given in degrees.
    pub fn inverse(&self, lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> Inverse {
        let (lon12, lon12s) = ang_diff(lon1, lon2);
        let mut lonsign = if lon12 >= 0.0 { 1.0 } else { -1.0 };
        let lon12 = lonsign * ang_round(lon12);
        let lon12s = ang_round((180.0 - lon12) - lonsign * lon12s);
        let lam12 = lon12.to_radians();
        let (slam12, clam12) = if lon12 > 90.0 {
            let (s, c) = sincosd(lon12s);
            (s, -c)
        } else {
            sincosd(lon12)
        };

        let mut lat1 = ang_round(lat_fix(lat1));
        let mut lat2 = ang_round(lat_fix(lat2));
        // Put the point farther from the equator first.
        let swapp = if lat1.abs() < lat2.abs() { -1.0 } else { 1.0 };
        if swapp < 0.0 {
            lonsign = -lonsign;
            std::mem::swap(&mut lat1, &mut lat2);
        }
        let latsign = if lat1 < 0.0 { 1.0 } else { -1.0 };
        lat1 *= latsign;
        lat2 *= latsign;

        let (mut sbet1, mut cbet1) = sincosd(lat1);
        sbet1 *= self.f1;
        norm2(&mut sbet1, &mut cbet1);
        cbet1 = cbet1.max(tiny());

        let (mut sbet2, mut cbet2) = sincosd(lat2);
        sbet2 *= self.f1;
        norm2(&mut sbet2, &mut cbet2);
        cbet2 = cbet2.max(tiny());

        if cbet1 < -sbet1 {
            if cbet2 == cbet1 {
                sbet2 = if sbet2 < 0.0 { sbet1 } else { -sbet1 };
            }
        } else if sbet2.abs() == -sbet1 {
            cbet2 = cbet1;
        }

        let dn1 = (1.0 + self.ep2 * sq(sbet1)).sqrt();
        let dn2 = (1.0 + self.ep2 * sq(sbet2)).sqrt();

        let mut meridian = lat1 == -90.0 || slam12 == 0.0;
        let (mut salp1, mut calp1, mut salp2, mut calp2) = (0.0, 0.0, 0.0, 0.0);
        let mut s12x = 0.0;
        let mut converged = true;

        if meridian {
            calp1 = clam12;
            salp1 = slam12;
            calp2 = 1.0;
            salp2 = 0.0;
            let ssig1 = sbet1;
            let csig1 = calp1 * cbet1;
            let ssig2 = sbet2;
            let csig2 = calp2 * cbet2;
            let mut sig12 = (csig1 * ssig2 - ssig1 * csig2)
                .max(0.0)
                .atan2(csig1 * csig2 + ssig1 * ssig2);
            let (s12b, m12b, _) =
                self.lengths(self.n, sig12, ssig1, csig1, dn1, ssig2, csig2, dn2);
            s12x = s12b;
            if sig12 < 1.0 || m12b >= 0.0 {
                if sig12 < 3.0 * tiny() {
                    sig12 = 0.0;
                    s12x = 0.0;
                }
                let _ = sig12;
                s12x *= self.b;
            } else {
                // Not a shortest path; solve the general case.
                meridian = false;
            }
        }

        if !meridian && sbet1 == 0.0 && (self.f <= 0.0 || lon12s >= self.f * 180.0) {
            // Equatorial geodesic.
            calp1 = 0.0;
            calp2 = 0.0;
            salp1 = 1.0;
            salp2 = 1.0;
            s12x = self.a * lam12;
        } else if !meridian {
            let (sig12, s1, c1, s2, c2, dnm) =
                self.inverse_start(sbet1, cbet1, sbet2, cbet2, lam12, slam12, clam12);
            salp1 = s1;
            calp1 = c1;
            if sig12 >= 0.0 {
                salp2 = s2;
                calp2 = c2;
                s12x = sig12 * self.b * dnm;
            } else {
                let mut tripn = false;
                let mut tripb = false;
                let (mut salp1a, mut calp1a) = (tiny(), 1.0);
                let (mut salp1b, mut calp1b) = (tiny(), -1.0);
                let mut last: Option<Lambda> = None;
                converged = false;
                for numit in 0..MAX_INVERSE_ITERATIONS {
                    let lam = self.lambda12(
                        sbet1,
                        cbet1,
                        dn1,
                        sbet2,
                        cbet2,
                        dn2,
                        salp1,
                        calp1,
                        slam12,
                        clam12,
                        numit < NEWTON_ITERATIONS,
                    );
                    let v = lam.lam12;
                    let dv = lam.dlam12;
                    last = Some(lam);
                    if tripb || v.abs() < if tripn { 8.0 } else { 1.0 } * TOL0 || v.is_nan() {
                        converged = true;
                        break;
                    }
                    // Update the bisection bracket.
                    if v > 0.0 && (numit > NEWTON_ITERATIONS || calp1 / salp1 > calp1b / salp1b) {
                        salp1b = salp1;
                        calp1b = calp1;
                    } else if v < 0.0
                        && (numit > NEWTON_ITERATIONS || calp1 / salp1 < calp1a / salp1a)
                    {
                        salp1a = salp1;
                        calp1a = calp1;
                    }
                    if numit < NEWTON_ITERATIONS && dv > 0.0 {
                        let dalp1 = -v / dv;
                        let (sdalp1, cdalp1) = dalp1.sin_cos();
                        let nsalp1 = salp1 * cdalp1 + calp1 * sdalp1;
                        if nsalp1 > 0.0 && dalp1.abs() < PI {
                            calp1 = calp1 * cdalp1 - salp1 * sdalp1;
                            salp1 = nsalp1;
                            norm2(&mut salp1, &mut calp1);
                            tripn = v.abs() <= 16.0 * TOL0;
                            continue;
                        }
                    }
                    salp1 = (salp1a + salp1b) / 2.0;
                    calp1 = (calp1a + calp1b) / 2.0;
                    norm2(&mut salp1, &mut calp1);
                    tripn = false;
                    let tolb = TOL0 * tol2();
                    tripb = (salp1a - salp1).abs() + (calp1a - calp1) < tolb
                        || (salp1 - salp1b).abs() + (calp1 - calp1b) < tolb;
                }
                let lam = last.expect("at least one iteration");
                salp2 = lam.salp2;
                calp2 = lam.calp2;
                let (s12b, _, _) = self.lengths(
                    lam.eps, lam.sig12, lam.ssig1, lam.csig1, dn1, lam.ssig2, lam.csig2, dn2,
                );
                s12x = s12b * self.b;
            }
        }

        if swapp < 0.0 {
            std::mem::swap(&mut salp1, &mut salp2);
            std::mem::swap(&mut calp1, &mut calp2);
        }
        salp1 *= swapp * lonsign;
        calp1 *= swapp * latsign;
        salp2 *= swapp * lonsign;
        calp2 *= swapp * latsign;

        Inverse {
            distance: 0.0 + s12x,
            azi1: atan2d(salp1, calp1),
            azi2: atan2d(salp2, calp2),
            converged,
        }
    }

    /// Length of the meridian arc between two latitudes (degrees).
    pub fn meridian_arc(&self, lat1: f64, lat2: f64) -> f64 {
        self.inverse(lat1, 0.0, lat2, 0.0).distance
    }

    /// Solves the direct problem: the point reached after travelling `s12`
    /// meters from (`lat1`, `lon1`) with initial azimuth `azi1`.
    pub fn direct(&self, lat1: f64, lon1: f64, azi1: f64, s12: f64) -> Direct {
        let (salp1, calp1) = sincosd(ang_round(azi1));
        let (mut sbet1, mut cbet1) = sincosd(ang_round(lat_fix(lat1)));
        sbet1 *= self.f1;
        norm2(&mut sbet1, &mut cbet1);
        cbet1 = cbet1.max(tiny());
        let salp0 = salp1 * cbet1;
        let calp0 = calp1.hypot(salp1 * sbet1);

        let mut ssig1 = sbet1;
        let somg1 = salp0 * sbet1;
        let mut csig1 = if sbet1 != 0.0 || calp1 != 0.0 {
            cbet1 * calp1
        } else {
            1.0
        };
        let comg1 = csig1;
        norm2(&mut ssig1, &mut csig1);

        let k2 = sq(calp0) * self.ep2;
        let eps = k2 / (2.0 * (1.0 + (1.0 + k2).sqrt()) + k2);
        let a1m1 = a1m1f(eps);
        let mut c1a = [0.0; ORDER + 1];
        c1f(eps, &mut c1a);
        let b11 = sin_cos_series(true, ssig1, csig1, &c1a);
        let (s, c) = b11.sin_cos();
        let stau1 = ssig1 * c + csig1 * s;
        let ctau1 = csig1 * c - ssig1 * s;
        let mut c1pa = [0.0; ORDER + 1];
        c1pf(eps, &mut c1pa);
        let mut c3a = [0.0; ORDER];
        self.c3f(eps, &mut c3a);
        let a3c = -self.f * salp0 * self.a3f(eps);
        let b31 = sin_cos_series(true, ssig1, csig1, &c3a);

        let tau12 = s12 / (self.b * (1.0 + a1m1));
        let (s, c) = tau12.sin_cos();
        let b12 = -sin_cos_series(true, stau1 * c + ctau1 * s, ctau1 * c - stau1 * s, &c1pa);
        let sig12 = tau12 - (b12 - b11);
        let (ssig12, csig12) = sig12.sin_cos();

        let ssig2 = ssig1 * csig12 + csig1 * ssig12;
        let mut csig2 = csig1 * csig12 - ssig1 * ssig12;
        let sbet2 = calp0 * ssig2;
        let mut cbet2 = salp0.hypot(calp0 * csig2);
        if cbet2 == 0.0 {
            cbet2 = tiny();
            csig2 = tiny();
        }
        let salp2 = salp0;
        let calp2 = calp0 * csig2;
        let somg2 = salp0 * ssig2;
        let comg2 = csig2;
        let e = 1.0f64.copysign(salp0);
        let omg12 = e
            * (sig12 - (ssig2.atan2(csig2) - ssig1.atan2(csig1))
                + ((e * somg2).atan2(comg2) - (e * somg1).atan2(comg1)));
        let lam12 = omg12 + a3c * (sig12 + (sin_cos_series(true, ssig2, csig2, &c3a) - b31));
        let lon12 = lam12.to_degrees();
        let lon2 = ang_normalize(ang_normalize(lon1) + ang_normalize(lon12));

        Direct {
            lat: atan2d(sbet2, self.f1 * cbet2),
            lon: lon2,
            azi: atan2d(salp2, calp2),
        }
    }
}

struct Lambda {
    lam12: f64,
    salp2: f64,
    calp2: f64,
    sig12: f64,
    ssig1: f64,
    csig1: f64,
    ssig2: f64,
    csig2: f64,
    eps: f64,
    dlam12: f64,
}

#[inline]
fn sq(x: f64) -> f64 {
    x * x
}

fn norm2(s: &mut f64, c: &mut f64) {
    let r = s.hypot(*c);
    *s /= r;
    *c /= r;
}

/// Horner evaluation of `p[0] x^n + ... + p[n]`.
fn polyval(n: usize, p: &[f64], x: f64) -> f64 {
    p[1..=n].iter().fold(p[0], |y, &c| y * x + c)
}

/// Clenshaw summation of `sum c[k] sin(2kx)` (`sinp`) or
/// `sum c[k] cos((2k+1)x)`. For the sine series `c[0]` is unused.
fn sin_cos_series(sinp: bool, sinx: f64, cosx: f64, c: &[f64]) -> f64 {
    let mut k = c.len();
    let mut n = k - usize::from(sinp);
    let ar = 2.0 * (cosx - sinx) * (cosx + sinx);
    let mut y0 = if n % 2 == 1 {
        k -= 1;
        c[k]
    } else {
        0.0
    };
    let mut y1 = 0.0;
    n /= 2;
    while n > 0 {
        n -= 1;
        k -= 1;
        y1 = ar * y0 - y1 + c[k];
        k -= 1;
        y0 = ar * y1 - y0 + c[k];
    }
    if sinp {
        2.0 * sinx * cosx * y0
    } else {
        cosx * (y0 - y1)
    }
}

fn a1m1f(eps: f64) -> f64 {
    let m = ORDER / 2;
    let t = polyval(m, &COEFF_A1M1, sq(eps)) / COEFF_A1M1[m + 1];
    (t + eps) / (1.0 - eps)
}

fn a2m1f(eps: f64) -> f64 {
    let m = ORDER / 2;
    let t = polyval(m, &COEFF_A2M1, sq(eps)) / COEFF_A2M1[m + 1];
    (t - eps) / (1.0 + eps)
}

fn series_coefficients(coeff: &[f64], eps: f64, c: &mut [f64; ORDER + 1]) {
    let eps2 = sq(eps);
    let mut d = eps;
    let mut o = 0;
    for (l, cl) in c.iter_mut().enumerate().skip(1) {
        let m = (ORDER - l) / 2;
        *cl = d * polyval(m, &coeff[o..], eps2) / coeff[o + m + 1];
        o += m + 2;
        d *= eps;
    }
}

fn c1f(eps: f64, c: &mut [f64; ORDER + 1]) {
    series_coefficients(&COEFF_C1, eps, c);
}

fn c1pf(eps: f64, c: &mut [f64; ORDER + 1]) {
    series_coefficients(&COEFF_C1P, eps, c);
}

fn c2f(eps: f64, c: &mut [f64; ORDER + 1]) {
    series_coefficients(&COEFF_C2, eps, c);
}

/// Largest root of the quartic `k^4 + 2k^3 - (x^2 + y^2 - 1)k^2 - 2y^2 k - y^2 = 0`.
fn astroid(x: f64, y: f64) -> f64 {
    let p = sq(x);
    let q = sq(y);
    let r = (p + q - 1.0) / 6.0;
    if q == 0.0 && r <= 0.0 {
        return 0.0;
    }
    let s = p * q / 4.0;
    let r2 = sq(r);
    let r3 = r * r2;
    let disc = s * (s + 2.0 * r3);
    let mut u = r;
    if disc >= 0.0 {
        let mut t3 = s + r3;
        t3 += if t3 < 0.0 { -disc.sqrt() } else { disc.sqrt() };
        let t = t3.cbrt();
        u += t + if t != 0.0 { r2 / t } else { 0.0 };
    } else {
        let ang = (-disc).sqrt().atan2(-(s + r3));
        u += 2.0 * r * (ang / 3.0).cos();
    }
    let v = (sq(u) + q).sqrt();
    let uv = if u < 0.0 { q / (v - u) } else { u + v };
    let w = (uv - q) / (2.0 * v);
    uv / ((uv + sq(w)).sqrt() + w)
}

/// Error-free sum: returns `(s, t)` with `s = fl(u + v)` and `s + t = u + v`.
fn two_sum(u: f64, v: f64) -> (f64, f64) {
    let s = u + v;
    let up = s - v;
    let vpp = s - up;
    let t = -((up - u) + (vpp - v));
    (s, t)
}

/// IEEE-style remainder of `x` by 360, in [-180, 180].
fn remainder360(x: f64) -> f64 {
    let y = x % 360.0;
    if y < -180.0 {
        y + 360.0
    } else if y > 180.0 {
        y - 360.0
    } else {
        y
    }
}

/// Reduces an angle to (-180, 180].
pub fn ang_normalize(x: f64) -> f64 {
    let y = remainder360(x);
    if y.abs() == 180.0 {
        180.0
    } else {
        y
    }
}

/// Exact difference `y - x` reduced to [-180, 180], plus the rounding error.
fn ang_diff(x: f64, y: f64) -> (f64, f64) {
    let (d, t) = two_sum(remainder360(-x), remainder360(y));
    let (d, t) = two_sum(remainder360(d), t);
    let d = if d == 0.0 || d.abs() == 180.0 {
        d.copysign(if t == 0.0 { y - x } else { -t })
    } else {
        d
    };
    (d, t)
}

/// Rounds tiny angles so that differences below 1/16 of a degree stay exact.
fn ang_round(x: f64) -> f64 {
    const Z: f64 = 1.0 / 16.0;
    let y = x.abs();
    let y = if y < Z { Z - (Z - y) } else { y };
    y.copysign(x)
}

fn lat_fix(x: f64) -> f64 {
    if x.abs() > 90.0 {
        f64::NAN
    } else {
        x
    }
}

/// Sine and cosine of an angle in degrees, exact at multiples of 90.
fn sincosd(x: f64) -> (f64, f64) {
    let r = x % 360.0;
    let q = (r / 90.0).round();
    let r = (r - 90.0 * q).to_radians();
    let (s, c) = r.sin_cos();
    let (sinx, cosx) = match (q as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    };
    let sinx = if sinx == 0.0 { sinx.copysign(x) } else { sinx };
    (sinx, 0.0 + cosx)
}

/// `atan2` in degrees with exact results on the axes.
fn atan2d(y: f64, x: f64) -> f64 {
    let (mut x, mut y) = (x, y);
    let mut q = 0;
    if y.abs() > x.abs() {
        std::mem::swap(&mut x, &mut y);
        q = 2;
    }
    if x.is_sign_negative() {
        x = -x;
        q += 1;
    }
    let ang = y.atan2(x).to_degrees();
    match q {
        1 => 180.0f64.copysign(y) - ang,
        2 => 90.0 - ang,
        3 => -90.0 + ang,
        _ => ang,
    }
}
