//! Radial profiles of axisymmetric metrics in cylinder coordinates.
//!
//! With z = e^{t+iθ} the chart plane minus the origin becomes the cylinder
//! ℝ×S¹, and an axisymmetric conformal metric takes the form
//! F(t)²(dt² + dθ²). Everything about such a metric reduces to the single
//! log-profile G = log F:
//!
//! - conformal exponent against the round sphere: u = G(t) + log cosh t,
//! - Gauss curvature: K = −G″/F²,
//! - area element: dμ = F² dt dθ,
//! - ambient height of the orbit at t: x3 = tanh t.
//!
//! The degenerating neck families place their caps at chart radius
//! e^{−(kπ²−2π)} — far below any fixed grid — so this module computes their
//! areas, curvature functionals, and mass integrals by one-dimensional
//! quadrature on the profile, exactly where the grid cannot reach. Grids
//! stay in charge of everything a grid can resolve; tests cross-check the
//! two paths on the overlap of their domains.

use crate::sphere::{smoothstep, smoothstep_d1, smoothstep_d2};
use std::f64::consts::PI;

/// log cosh t without overflow for large |t|.
pub(crate) fn ln_cosh(t: f64) -> f64 {
    let a = t.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

// ---------------------------------------------------------------------------
// Branches
// ---------------------------------------------------------------------------

/// One analytic piece of a profile: G(t) with two derivatives.
#[derive(Debug, Clone)]
enum Branch {
    /// Spherical cap of radius r₀ centered at t₀: G = log r₀ − log cosh(t−t₀).
    /// Constant curvature 1/r₀².
    Cap { ln_r0: f64, t0: f64 },
    /// Hyperbolic neck: G = −log(2kπ) − log cos((t−shift)/(2kπ)).
    /// Constant curvature −1.
    Neck { k: f64, shift: f64 },
    /// Flat cylinder: G = log F constant. Curvature 0.
    Flat { ln_f: f64 },
    /// Quintic smoothstep blend in G between two branches over [lo, hi].
    Blend {
        lo: f64,
        hi: f64,
        from: Box<Branch>,
        to: Box<Branch>,
    },
}

impl Branch {
    fn g(&self, t: f64) -> f64 {
        match self {
            Branch::Cap { ln_r0, t0 } => ln_r0 - ln_cosh(t - t0),
            Branch::Neck { k, shift } => {
                let w = 2.0 * k * PI;
                -w.ln() - ((t - shift) / w).cos().ln()
            }
            Branch::Flat { ln_f } => *ln_f,
            Branch::Blend { lo, hi, from, to } => {
                let s = smoothstep((t - lo) / (hi - lo));
                (1.0 - s) * from.g(t) + s * to.g(t)
            }
        }
    }

    fn g1(&self, t: f64) -> f64 {
        match self {
            Branch::Cap { t0, .. } => -(t - t0).tanh(),
            Branch::Neck { k, shift } => {
                let w = 2.0 * k * PI;
                ((t - shift) / w).tan() / w
            }
            Branch::Flat { .. } => 0.0,
            Branch::Blend { lo, hi, from, to } => {
                let width = hi - lo;
                let tau = (t - lo) / width;
                let s = smoothstep(tau);
                let ds = smoothstep_d1(tau) / width;
                (1.0 - s) * from.g1(t) + s * to.g1(t) + ds * (to.g(t) - from.g(t))
            }
        }
    }

    fn g2(&self, t: f64) -> f64 {
        match self {
            Branch::Cap { t0, .. } => {
                let c = (t - t0).cosh();
                -1.0 / (c * c)
            }
            Branch::Neck { k, shift } => {
                let w = 2.0 * k * PI;
                let c = ((t - shift) / w).cos();
                1.0 / (w * w * c * c)
            }
            Branch::Flat { .. } => 0.0,
            Branch::Blend { lo, hi, from, to } => {
                let width = hi - lo;
                let tau = (t - lo) / width;
                let s = smoothstep(tau);
                let ds = smoothstep_d1(tau) / width;
                let d2s = smoothstep_d2(tau) / (width * width);
                (1.0 - s) * from.g2(t) + s * to.g2(t)
                    + 2.0 * ds * (to.g1(t) - from.g1(t))
                    + d2s * (to.g(t) - from.g(t))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

/// Piecewise-analytic log-profile G(t) of an axisymmetric metric, with the
/// metadata quadrature and diagnostics need.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    /// (upper end of validity, branch), ascending; the last entry is the
    /// +∞ cap with upper end f64::INFINITY.
    branches: Vec<(f64, Branch)>,
    /// Interior branch boundaries, ascending (empty for single-branch).
    breakpoints: Vec<f64>,
    /// t-interval of the pure hyperbolic neck, if the profile has one.
    pub neck: Option<(f64, f64)>,
    /// t-interval of the flat middle segment, if present.
    pub flat: Option<(f64, f64)>,
}

/// Cap parameters matching a neck end of slope m = G′ and value G at t̄:
/// t₀ = t̄ + artanh(m), r₀ = e^{G}·cosh(artanh m) = e^{G}/√(1−m²).
fn matching_cap(t_bar: f64, g_val: f64, slope: f64) -> Branch {
    // The neck end slopes inward (|m| < 1 for every k), so artanh is safe.
    let t0 = t_bar + slope.atanh();
    let ln_r0 = g_val + (t_bar - t0).cosh().ln();
    Branch::Cap { ln_r0, t0 }
}

impl RadialProfile {
    fn from_branches(branches: Vec<(f64, Branch)>) -> Self {
        let breakpoints = branches[..branches.len() - 1]
            .iter()
            .map(|(end, _)| *end)
            .collect();
        Self {
            branches,
            breakpoints,
            neck: None,
            flat: None,
        }
    }

    /// The round sphere: F = sech t.
    pub fn round() -> Self {
        Self::from_branches(vec![(f64::INFINITY, Branch::Cap { ln_r0: 0.0, t0: 0.0 })])
    }

    /// The round sphere dilated by s toward the t = −∞ pole:
    /// F = sech(t + log s), so for s > 1 the mass peaks at t = −log s.
    pub fn dilated(s: f64) -> Self {
        Self::from_branches(vec![(
            f64::INFINITY,
            Branch::Cap { ln_r0: 0.0, t0: -s.ln() },
        )])
    }

    /// Hyperbolic-neck dumbbell: the factor 1/(2kπ·cos(t/2kπ)) on
    /// |t| ≤ kπ² − 2π, blended into matching spherical caps over collars of
    /// length 2π at both ends.
    pub fn cylinder_sphere(k: u32) -> Self {
        let kf = k as f64;
        let t_neck = kf * PI * PI - 2.0 * PI;
        let neck = Branch::Neck { k: kf, shift: 0.0 };
        let m = neck.g1(t_neck);
        let cap_pos = matching_cap(t_neck, neck.g(t_neck), m);
        let cap_neg = matching_cap(-t_neck, neck.g(-t_neck), -m);
        let blend_hi = t_neck + 2.0 * PI;
        let mut profile = Self::from_branches(vec![
            (-blend_hi, cap_neg.clone()),
            (
                -t_neck,
                Branch::Blend {
                    lo: -blend_hi,
                    hi: -t_neck,
                    from: Box::new(cap_neg),
                    to: Box::new(neck.clone()),
                },
            ),
            (t_neck, neck.clone()),
            (
                blend_hi,
                Branch::Blend {
                    lo: t_neck,
                    hi: blend_hi,
                    from: Box::new(neck),
                    to: Box::new(cap_pos.clone()),
                },
            ),
            (f64::INFINITY, cap_pos),
        ]);
        profile.neck = Some((-t_neck, t_neck));
        profile
    }

    /// Flat-middle dumbbell: flat factor 1/(2kπ) on |t| ≤ k², hyperbolic
    /// necks continuing C¹ to |t| = k² + kπ² − 2π, then blended caps.
    ///
    /// The junctions at |t| = k² keep the curvature jump (−1 against 0) of
    /// the underlying construction; only the cap attachment is smoothed.
    pub fn flat_neck_sphere(k: u32) -> Self {
        let kf = k as f64;
        let t_flat = kf * kf;
        let t_neck = t_flat + kf * PI * PI - 2.0 * PI;
        let flat = Branch::Flat { ln_f: -(2.0 * kf * PI).ln() };
        let neck_pos = Branch::Neck { k: kf, shift: t_flat };
        let neck_neg = Branch::Neck { k: kf, shift: -t_flat };
        let m = neck_pos.g1(t_neck);
        let cap_pos = matching_cap(t_neck, neck_pos.g(t_neck), m);
        let cap_neg = matching_cap(-t_neck, neck_neg.g(-t_neck), -m);
        let blend_hi = t_neck + 2.0 * PI;
        let mut profile = Self::from_branches(vec![
            (-blend_hi, cap_neg.clone()),
            (
                -t_neck,
                Branch::Blend {
                    lo: -blend_hi,
                    hi: -t_neck,
                    from: Box::new(cap_neg),
                    to: Box::new(neck_neg.clone()),
                },
            ),
            (-t_flat, neck_neg),
            (t_flat, flat),
            (t_neck, neck_pos.clone()),
            (
                blend_hi,
                Branch::Blend {
                    lo: t_neck,
                    hi: blend_hi,
                    from: Box::new(neck_pos),
                    to: Box::new(cap_pos.clone()),
                },
            ),
            (f64::INFINITY, cap_pos),
        ]);
        profile.neck = Some((-t_neck, t_neck));
        profile.flat = Some((-t_flat, t_flat));
        profile
    }

    fn branch_at(&self, t: f64) -> &Branch {
        for (end, branch) in &self.branches {
            if t <= *end {
                return branch;
            }
        }
        &self.branches.last().unwrap().1
    }

    /// G(t) = log F(t).
    pub fn g(&self, t: f64) -> f64 {
        self.branch_at(t).g(t)
    }

    /// G′(t).
    pub fn g1(&self, t: f64) -> f64 {
        self.branch_at(t).g1(t)
    }

    /// G″(t).
    pub fn g2(&self, t: f64) -> f64 {
        self.branch_at(t).g2(t)
    }

    /// Squared factor F² = e^{2G} (the area density per dt dθ).
    pub fn f2(&self, t: f64) -> f64 {
        (2.0 * self.g(t)).exp()
    }

    /// Conformal exponent against the round sphere: u = G + log cosh t.
    ///
    /// Finite limits at t → ±∞ (the caps are asymptotically round), so
    /// callers may clamp large |t|.
    pub fn u(&self, t: f64) -> f64 {
        let t = self.clamp_t(t);
        self.g(t) + ln_cosh(t)
    }

    /// du/dt — used for sup|u′| diagnostics.
    pub fn u1(&self, t: f64) -> f64 {
        let t = self.clamp_t(t);
        self.g1(t) + t.tanh()
    }

    /// Chart conformal exponent w = G − t, with e^{2w}|dz|² the metric on
    /// the t = log|z| chart.
    pub fn w(&self, t: f64) -> f64 {
        self.g(t) - t
    }

    /// Gauss curvature K(t) = −G″/F².
    pub fn k_curv(&self, t: f64) -> f64 {
        let t = self.clamp_t(t);
        -self.g2(t) * (-2.0 * self.g(t)).exp()
    }

    /// Interior breakpoints between analytic pieces.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// The t-range outside which every branch is an exact cap whose
    /// integrands have decayed below 1e-20 of their scale.
    fn support(&self) -> (f64, f64) {
        match (self.breakpoints.first(), self.breakpoints.last()) {
            (Some(&lo), Some(&hi)) => (lo - 25.0, hi + 25.0),
            // Single cap (round / dilated): center on its peak.
            _ => {
                if let Branch::Cap { t0, .. } = &self.branches[0].1 {
                    (t0 - 25.0, t0 + 25.0)
                } else {
                    (-25.0, 25.0)
                }
            }
        }
    }

    fn clamp_t(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        t.clamp(lo - 15.0, hi + 15.0)
    }

    // -- quadrature ---------------------------------------------------------

    /// Composite Simpson over [a, b] split at profile breakpoints, with
    /// panels of at most `panel` in t.
    fn integrate_with(&self, a: f64, b: f64, panel: f64, f: &dyn Fn(f64) -> f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let mut cuts = vec![a];
        for &bp in &self.breakpoints {
            if bp > a && bp < b {
                cuts.push(bp);
            }
        }
        cuts.push(b);
        let mut total = 0.0;
        for pair in cuts.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let len = hi - lo;
            let panels = ((len / panel).ceil() as usize).max(2);
            let h = len / panels as f64;
            let mut sum = f(lo) + f(hi);
            for i in 1..panels {
                let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
                sum += weight * f(lo + i as f64 * h);
            }
            // Simpson needs an even panel count; an odd count gets one
            // trapezoid-corrected midpoint, which the doubling below avoids.
            if panels % 2 == 1 {
                // Recompute with panels+1 to stay a pure Simpson rule.
                let panels = panels + 1;
                let h = len / panels as f64;
                let mut s2 = f(lo) + f(hi);
                for i in 1..panels {
                    let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
                    s2 += weight * f(lo + i as f64 * h);
                }
                total += s2 * h / 3.0;
            } else {
                total += sum * h / 3.0;
            }
        }
        total
    }

    /// ∫ f(t) dt over the whole line (support-truncated), breakpoint-split.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        let (lo, hi) = self.support();
        self.integrate_with(lo, hi, 0.01, &f)
    }

    /// Total area 2π ∫ F² dt.
    pub fn area(&self) -> f64 {
        2.0 * PI * self.integrate(|t| self.f2(t))
    }

    /// Area of the band a ≤ t ≤ b.
    pub fn band_area(&self, a: f64, b: f64) -> f64 {
        2.0 * PI * self.integrate_with(a, b, 0.01, &|t| self.f2(t))
    }

    /// ∫ K dμ = 2π ∫ −G″ dt (telescopes to 4π for closed profiles).
    pub fn total_curvature(&self) -> f64 {
        2.0 * PI * self.integrate(|t| -self.g2(t))
    }

    /// Curvature entropy ∫ |K| log(1+|K|) dμ.
    pub fn entropy(&self) -> f64 {
        2.0 * PI
            * self.integrate(|t| {
                let k = self.k_curv(t);
                k.abs() * k.abs().ln_1p() * self.f2(t)
            })
    }

    /// ∫ |K − 1|^p dμ.
    pub fn deviation(&self, p: f64) -> f64 {
        2.0 * PI
            * self.integrate(|t| {
                let k = self.k_curv(t);
                (k - 1.0).abs().powf(p) * self.f2(t)
            })
    }

    /// Mass 2π ∫_{−∞}^{t} F² of the cap below t (a geodesic ball about the
    /// t = −∞ pole).
    pub fn mass_below(&self, t: f64) -> f64 {
        let (lo, _) = self.support();
        if t <= lo {
            // Analytic tail of the −∞ cap: ∫ r0² sech²(τ−t0) dτ.
            if let Branch::Cap { ln_r0, t0 } = &self.branches[0].1 {
                let r02 = (2.0 * ln_r0).exp();
                return 2.0 * PI * r02 * (1.0 + (t - t0).tanh());
            }
            return 0.0;
        }
        let tail = self.mass_below(lo);
        tail + 2.0 * PI * self.integrate_with(lo, t.min(self.support().1 + 15.0), 0.01, &|t| self.f2(t))
    }

    /// Ambient center-of-mass height: (2π/μ) ∫ tanh(t)·F² dt.
    pub fn center_x3(&self) -> f64 {
        2.0 * PI * self.integrate(|t| t.tanh() * self.f2(t)) / self.area()
    }

    /// Mass of the geodesic ball of radius r about a point at angle β from
    /// the t = −∞ pole.
    ///
    /// The orbit at t sits at colatitude α with cos α = −tanh t; the ball
    /// cuts the orbit in an arc of angle Θ given by the spherical law of
    /// cosines. On-axis (β ≈ 0 or π) the closed-form cap mass is used.
    pub fn mass_in_ball(&self, beta: f64, r: f64) -> f64 {
        if r >= PI {
            return self.area();
        }
        if beta < 1e-9 {
            return self.mass_below((-(r.cos())).atanh());
        }
        if beta > PI - 1e-9 {
            return self.area() - self.mass_below((-((PI - r).cos())).atanh());
        }
        let (cos_b, sin_b) = (beta.cos(), beta.sin());
        let cos_r = r.cos();
        let width = |t: f64| -> f64 {
            let cos_a = -t.tanh();
            let sin_a = (1.0 - cos_a * cos_a).sqrt().max(1e-300);
            let q = (cos_r - cos_a * cos_b) / (sin_a * sin_b);
            if q <= -1.0 {
                std::f64::consts::TAU
            } else if q >= 1.0 {
                0.0
            } else {
                2.0 * q.acos()
            }
        };
        let (lo, hi) = self.support();
        // Tails: beyond the support the caps are round and essentially
        // massless except the −∞ cap; include its closed-form share.
        let tail = {
            // Fraction of the deep cap inside the ball: the cap is within
            // angle ~0 of the pole, so it is inside iff β < r.
            if beta < r {
                self.mass_below(lo)
            } else {
                0.0
            }
        };
        tail + self.integrate_with(lo, hi, 0.004, &|t| self.f2(t) * width(t))
    }

    /// sup over t of |u(t)| (attained on a compact set: u is asymptotically
    /// constant on the caps).
    pub fn sup_abs_u(&self) -> f64 {
        let (lo, hi) = self.support();
        let mut sup: f64 = 0.0;
        let steps = ((hi - lo) / 0.005).ceil() as usize;
        for i in 0..=steps {
            let t = lo + (hi - lo) * i as f64 / steps as f64;
            sup = sup.max(self.u(t).abs());
        }
        sup.max(self.u(lo - 10.0).abs()).max(self.u(hi + 10.0).abs())
    }

    /// sup over t of |u′(t)|.
    pub fn sup_abs_u1(&self) -> f64 {
        let (lo, hi) = self.support();
        let mut sup: f64 = 0.0;
        let steps = ((hi - lo) / 0.005).ceil() as usize;
        for i in 0..=steps {
            let t = lo + (hi - lo) * i as f64 / steps as f64;
            sup = sup.max(self.u1(t).abs());
        }
        sup
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FOUR_PI: f64 = 4.0 * PI;

    #[test]
    fn round_profile_is_flat_in_u() {
        let p = RadialProfile::round();
        for t in [-8.0, -1.0, 0.0, 0.3, 2.0, 10.0] {
            assert!(p.u(t).abs() < 1e-12, "u({t}) = {}", p.u(t));
            assert!((p.k_curv(t) - 1.0).abs() < 1e-12);
        }
        assert!((p.area() - FOUR_PI).abs() < 1e-9);
        assert!((p.total_curvature() - FOUR_PI).abs() < 1e-9);
        assert!((p.entropy() - FOUR_PI * 2.0_f64.ln()).abs() < 1e-9);
        assert!(p.deviation(1.0).abs() < 1e-9);
    }

    #[test]
    fn dilated_profile_matches_closed_forms() {
        let s = 100.0;
        let p = RadialProfile::dilated(s);
        // Möbius pullbacks of round keep K ≡ 1 and area 4π.
        for t in [-8.0, -4.6, 0.0, 3.0] {
            assert!((p.k_curv(t) - 1.0).abs() < 1e-10);
        }
        assert!((p.area() - FOUR_PI).abs() < 1e-8);
        // Cumulative mass: 2π(1 + tanh(t + log s)).
        for t in [-7.0, -4.6, -2.0, 1.0] {
            let expect = 2.0 * PI * (1.0 + (t + s.ln()).tanh());
            assert!(
                (p.mass_below(t) - expect).abs() < 1e-8,
                "mass_below({t}) = {} vs {expect}",
                p.mass_below(t)
            );
        }
        // Concentration at the t = −∞ pole pushes the center of mass down.
        assert!(p.center_x3() < -0.99);
        // u agrees with the ambient closed form through x3 = tanh t.
        for t in [-5.0, -1.0, 0.0, 2.0] {
            let x3 = t.tanh();
            let expect = (2.0 * s).ln() - ((1.0 - x3) + s * s * (1.0 + x3)).ln();
            assert!((p.u(t) - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn neck_curvature_is_minus_one_exactly() {
        for k in [1u32, 2, 4] {
            let p = RadialProfile::cylinder_sphere(k);
            let (lo, hi) = p.neck.unwrap();
            for i in 0..=20 {
                let t = lo + (hi - lo) * i as f64 / 20.0;
                assert!(
                    (p.k_curv(t) + 1.0).abs() < 1e-11,
                    "K({t}) = {} for k = {k}",
                    p.k_curv(t)
                );
            }
        }
    }

    #[test]
    fn neck_area_matches_the_closed_form() {
        // 2cos(1/k)/(k·sin(1/k)) over the pure neck band.
        for (k, expect) in [(1u32, 1.2841853447918), (2, 1.8304877217124)] {
            let p = RadialProfile::cylinder_sphere(k);
            let (lo, hi) = p.neck.unwrap();
            let area = p.band_area(lo, hi);
            assert!(
                (area - expect).abs() < 1e-9,
                "neck area {area} vs {expect} at k = {k}"
            );
        }
    }

    #[test]
    fn gauss_bonnet_holds_for_all_families() {
        for p in [
            RadialProfile::round(),
            RadialProfile::dilated(10.0),
            RadialProfile::cylinder_sphere(1),
            RadialProfile::cylinder_sphere(2),
            RadialProfile::cylinder_sphere(4),
            RadialProfile::flat_neck_sphere(1),
            RadialProfile::flat_neck_sphere(2),
            RadialProfile::flat_neck_sphere(4),
        ] {
            let gb = p.total_curvature();
            assert!((gb - FOUR_PI).abs() < 1e-8, "∫K dμ = {gb}");
        }
    }

    #[test]
    fn profiles_are_c1_across_breakpoints() {
        for p in [
            RadialProfile::cylinder_sphere(2),
            RadialProfile::flat_neck_sphere(2),
        ] {
            for &bp in p.breakpoints() {
                let eps = 1e-9;
                let dg = (p.g(bp + eps) - p.g(bp - eps)).abs();
                let dg1 = (p.g1(bp + eps) - p.g1(bp - eps)).abs();
                assert!(dg < 1e-7, "G jump {dg} at {bp}");
                assert!(dg1 < 1e-6, "G′ jump {dg1} at {bp}");
            }
        }
    }

    #[test]
    fn flat_segment_is_flat_with_area_one_over_pi() {
        for k in [1u32, 2, 4] {
            let p = RadialProfile::flat_neck_sphere(k);
            let (lo, hi) = p.flat.unwrap();
            let mid = 0.5 * (lo + hi);
            assert!(p.k_curv(mid).abs() < 1e-14);
            assert!(p.k_curv(lo + 0.1 * (hi - lo)).abs() < 1e-14);
            // (1/(2kπ))² · 2k² · 2π = 1/π for every k.
            let area = p.band_area(lo, hi);
            assert!(
                (area - 1.0 / PI).abs() < 1e-10,
                "flat area {area} vs {} at k = {k}",
                1.0 / PI
            );
        }
    }

    #[test]
    fn dev1_splits_into_neck_and_cap_contributions() {
        // On the neck K = −1, so |K−1| = 2 and dev1 ≥ 2·neck area.
        let p = RadialProfile::cylinder_sphere(2);
        let (lo, hi) = p.neck.unwrap();
        let dev1 = p.deviation(1.0);
        let neck_share = 2.0 * p.band_area(lo, hi);
        assert!(dev1 >= neck_share - 1e-9, "dev1 = {dev1} < {neck_share}");
        // devp at p = 1 is the same integral through the generic path.
        assert!((p.deviation(1.0) - dev1).abs() < 1e-12);
    }

    #[test]
    fn mass_below_is_monotone_and_exhausts_the_area() {
        let p = RadialProfile::cylinder_sphere(2);
        let mut last = 0.0;
        for i in 0..40 {
            let t = -30.0 + i as f64 * 1.5;
            let m = p.mass_below(t);
            assert!(m >= last - 1e-10, "mass not monotone at t = {t}");
            last = m;
        }
        assert!((p.mass_below(40.0) - p.area()).abs() < 1e-6);
    }

    #[test]
    fn ball_mass_agrees_with_axis_closed_form_for_tiny_beta() {
        let p = RadialProfile::dilated(5.0);
        for r in [0.3, 0.8, 1.6] {
            let on_axis = p.mass_in_ball(0.0, r);
            let near_axis = p.mass_in_ball(1e-4, r);
            assert!(
                (on_axis - near_axis).abs() < 1e-4,
                "axis limit mismatch at r = {r}: {on_axis} vs {near_axis}"
            );
        }
    }

    #[test]
    fn ball_mass_is_monotone_in_radius() {
        let p = RadialProfile::cylinder_sphere(1);
        let beta = 0.7;
        let mut last = 0.0;
        for i in 1..30 {
            let r = i as f64 * 0.1;
            let m = p.mass_in_ball(beta, r);
            assert!(m >= last - 1e-12);
            last = m;
        }
    }

    #[test]
    fn cap_constants_match_the_neck_end() {
        // The +∞ cap of cylinder_sphere(1): r0 = 1/(2π sin 1 √(1−m²)),
        // t0 = T + artanh(m) with m = cot(1)/(2π), T = π² − 2π.
        let p = RadialProfile::cylinder_sphere(1);
        let t_neck = PI * PI - 2.0 * PI;
        let m = (1.0_f64).tan().recip() / (2.0 * PI);
        let r0 = 1.0 / (2.0 * PI * (1.0_f64).sin() * (1.0 - m * m).sqrt());
        let t0 = t_neck + m.atanh();
        // Far out on the cap u should equal the constant log r0 + t0.
        let u_limit = r0.ln() + t0;
        assert!(
            (p.u(t0 + 30.0) - u_limit).abs() < 1e-9,
            "cap limit {} vs {u_limit}",
            p.u(t0 + 30.0)
        );
        // sup|u| is attained at the caps for the dumbbells.
        assert!((p.sup_abs_u() - u_limit).abs() < 1e-6);
    }
}
