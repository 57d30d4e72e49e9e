//! Mellin-Barnes integrals over straight vertical contours.
//!
//! An integrand is a ratio of Gamma factors `Γ(a + b·s + c·t)` times
//! `z1^s z2^t`, optionally multiplied by separable closures of `s` and of
//! `t`. Poles of a closure are declared as guard factors so the contour
//! check sees them. One variable gives a Meijer-G type integral
//!
//! ```text
//! (1/2πi) ∫ f(s) ds = (1/π) Re ∫_0^∞ f(c + iy) dy
//! ```
//!
//! and two variables a bivariate Fox-H type integral. The anchor `c` sits
//! at the real-axis minimum of `|f|` (the saddle of the vertical integral),
//! kept a margin away from the nearest pole.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::quad::{legendre, LegendreRule};
use super::{ln_gamma_unchecked, SpecfunError};

/// Separable multiplier evaluated on the contour.
pub type Multiplier<'a> = &'a (dyn Fn(Complex64) -> Complex64 + Sync);

const BOX: f64 = 60.0;
const MAX_MARGIN: f64 = 0.25;
const ANCHOR_ROUNDS: usize = 64;
const MAX_PANEL: f64 = 10.0;
const PERIODS_PER_PANEL: f64 = 8.0;

/// `Γ(offset + coeff[0]·s + coeff[1]·t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaFactor {
    pub offset: f64,
    pub coeff: [f64; 2],
}

impl GammaFactor {
    pub const fn new(offset: f64, coeff_s: f64, coeff_t: f64) -> Self {
        Self { offset, coeff: [coeff_s, coeff_t] }
    }

    /// Factor in the first variable only.
    pub const fn s(offset: f64, coeff: f64) -> Self {
        Self::new(offset, coeff, 0.0)
    }

    /// Factor in the second variable only.
    pub const fn t(offset: f64, coeff: f64) -> Self {
        Self::new(offset, 0.0, coeff)
    }

    #[inline]
    fn arg(&self, s: Complex64, t: Complex64) -> Complex64 {
        self.offset + self.coeff[0] * s + self.coeff[1] * t
    }

    #[inline]
    fn real_arg(&self, x: [f64; 2]) -> f64 {
        self.offset + self.coeff[0] * x[0] + self.coeff[1] * x[1]
    }

    fn is_constant(&self) -> bool {
        self.coeff[0] == 0.0 && self.coeff[1] == 0.0
    }

    fn is_joint(&self) -> bool {
        self.coeff[0] != 0.0 && self.coeff[1] != 0.0
    }

    /// Human-readable form, e.g. `Γ(0.5 - s + 0.5t)`.
    pub fn label(&self) -> String {
        let mut out = format!("Γ({}", self.offset);
        for (c, name) in self.coeff.iter().zip(["s", "t"]) {
            if *c == 0.0 {
                continue;
            }
            let sign = if *c < 0.0 { '-' } else { '+' };
            if c.abs() == 1.0 {
                out.push_str(&format!(" {sign} {name}"));
            } else {
                out.push_str(&format!(" {sign} {}{name}", c.abs()));
            }
        }
        out.push(')');
        out
    }
}

/// Gamma-factor signature of one Mellin-Barnes integrand.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GammaFactorList {
    pub numerator: Vec<GammaFactor>,
    pub denominator: Vec<GammaFactor>,
    /// Contour constraints from poles of separable multipliers; no value.
    pub guards: Vec<GammaFactor>,
}

impl GammaFactorList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(mut self, f: GammaFactor) -> Self {
        self.numerator.push(f);
        self
    }

    pub fn den(mut self, f: GammaFactor) -> Self {
        self.denominator.push(f);
        self
    }

    pub fn guard(mut self, f: GammaFactor) -> Self {
        self.guards.push(f);
        self
    }

    /// Signature of `G^{m,n}_{p,q}(z | a; b)` with integrand
    /// `Π_{j<m} Γ(b_j - s) Π_{j<n} Γ(1 - a_j + s) / (Π_{j>=m} Γ(1 - b_j + s) Π_{j>=n} Γ(a_j - s)) z^s`.
    pub fn meijer_g(m: usize, n: usize, a: &[f64], b: &[f64]) -> Result<Self, SpecfunError> {
        if m > b.len() || n > a.len() {
            return Err(SpecfunError::Domain(format!(
                "G^{{{m},{n}}}_{{{},{}}} is not a valid signature",
                a.len(),
                b.len()
            )));
        }
        let mut list = Self::new();
        for (j, &bj) in b.iter().enumerate() {
            list = if j < m { list.num(GammaFactor::s(bj, -1.0)) } else { list.den(GammaFactor::s(1.0 - bj, 1.0)) };
        }
        for (j, &aj) in a.iter().enumerate() {
            list = if j < n { list.num(GammaFactor::s(1.0 - aj, 1.0)) } else { list.den(GammaFactor::s(aj, -1.0)) };
        }
        Ok(list)
    }

    /// Number of integration variables actually used (1 or 2).
    pub fn variables(&self) -> usize {
        let uses_t = self.numerator.iter().chain(&self.denominator).chain(&self.guards).any(|f| f.coeff[1] != 0.0);
        if uses_t {
            2
        } else {
            1
        }
    }

    fn constraints(&self) -> impl Iterator<Item = &GammaFactor> {
        self.numerator.iter().chain(&self.guards)
    }
}

/// Contour placement and truncation controls.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourSpec {
    /// Real part per variable; `None` picks the saddle automatically.
    pub anchor: [Option<f64>; 2],
    /// Initial truncation of the imaginary axis.
    pub half_length: f64,
    /// Gauss-Legendre nodes per panel.
    pub nodes: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_half_length: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        Self {
            anchor: [None, None],
            half_length: 20.0,
            nodes: 64,
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_half_length: 1280.0,
        }
    }
}

impl ContourSpec {
    pub fn with_anchor(mut self, anchor: [Option<f64>; 2]) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn with_tolerance(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    fn validate(&self) -> Result<(), SpecfunError> {
        if self.nodes < 32 {
            return Err(SpecfunError::InvalidContour(format!("node count {} < 32", self.nodes)));
        }
        if !(self.half_length > 0.0) || !(self.max_half_length >= self.half_length) {
            return Err(SpecfunError::InvalidContour(format!(
                "half-length {} / max {} invalid",
                self.half_length, self.max_half_length
            )));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol >= 0.0) {
            return Err(SpecfunError::InvalidContour("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Value of a contour integral with its error bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub abs_err: f64,
    pub converged: bool,
    /// Contour anchors used.
    pub anchor: [f64; 2],
    /// Final truncation of the imaginary axis.
    pub half_length: f64,
    /// Parameter perturbation applied to dodge a pole collision, if any.
    pub perturbation: Option<f64>,
    /// Integral of the integrand's modulus; far above `|value|` means cancellation.
    pub l1: f64,
}

/// A Mellin-Barnes integrand ready for evaluation.
pub struct MellinBarnes<'a> {
    list: &'a GammaFactorList,
    ln_z: [f64; 2],
    extra: [Option<Multiplier<'a>>; 2],
}

struct Node {
    y: f64,
    w: f64,
    ln: Complex64,
    mult: Complex64,
}

impl<'a> MellinBarnes<'a> {
    /// Integrand `factors · exp(ln_z[0]·s + ln_z[1]·t)`.
    pub fn new(list: &'a GammaFactorList, ln_z: [f64; 2]) -> Self {
        Self { list, ln_z, extra: [None, None] }
    }

    /// Attach a separable multiplier in variable `var` (0 = s, 1 = t).
    pub fn with_multiplier(mut self, var: usize, f: Multiplier<'a>) -> Self {
        self.extra[var] = Some(f);
        self
    }

    fn dims(&self) -> usize {
        if self.extra[1].is_some() {
            2
        } else {
            self.list.variables()
        }
    }

    /// `ln |f|` at a real point.
    pub fn ln_abs_at(&self, x: [f64; 2]) -> f64 {
        let s = Complex64::new(x[0], 0.0);
        let t = Complex64::new(x[1], 0.0);
        let mut acc = self.ln_z[0] * x[0] + self.ln_z[1] * x[1];
        for f in &self.list.numerator {
            acc += ln_gamma_unchecked(f.arg(s, t)).re;
        }
        for f in &self.list.denominator {
            acc -= ln_gamma_unchecked(f.arg(s, t)).re;
        }
        for (v, e) in self.extra.iter().enumerate() {
            if let Some(e) = e {
                acc += e(if v == 0 { s } else { t }).norm().ln();
            }
        }
        acc
    }

    /// Open feasible interval of variable `var` with the other held at `x`.
    fn feasible_interval(&self, var: usize, x: [f64; 2]) -> Result<(f64, f64), SpecfunError> {
        let other = 1 - var;
        let mut lo = (-BOX, None::<GammaFactor>);
        let mut hi = (BOX, None::<GammaFactor>);
        for f in self.list.constraints() {
            let c = f.coeff[var];
            let rest = f.offset + f.coeff[other] * x[other];
            if c == 0.0 {
                if f.coeff[other] != 0.0 && rest <= 0.0 {
                    return Err(SpecfunError::AnchorInfeasible { anchor: x[other], factor: f.label() });
                }
                continue;
            }
            let edge = -rest / c;
            if c > 0.0 && edge > lo.0 {
                lo = (edge, Some(*f));
            } else if c < 0.0 && edge < hi.0 {
                hi = (edge, Some(*f));
            }
        }
        if lo.0 >= hi.0 {
            let left = lo.1.map_or_else(|| "box".to_string(), |f| f.label());
            let right = hi.1.map_or_else(|| "box".to_string(), |f| f.label());
            let gap = lo.0 - hi.0;
            let same_step = match (lo.1, hi.1) {
                (Some(l), Some(r)) => l.coeff[var].abs() == r.coeff[var].abs(),
                _ => false,
            };
            if same_step && (gap - gap.round()).abs() < 1e-9 * (1.0 + gap.abs()) {
                return Err(SpecfunError::Degenerate { left, right });
            }
            return Err(SpecfunError::InseparablePoles { left, right });
        }
        Ok((lo.0, hi.0))
    }

    fn check_constants(&self) -> Result<(), SpecfunError> {
        for f in self.list.numerator.iter().chain(&self.list.denominator) {
            if f.is_constant() && f.offset <= 0.0 && f.offset == f.offset.round() {
                return Err(SpecfunError::Pole { re: f.offset, im: 0.0 });
            }
        }
        Ok(())
    }

    fn check_anchor(&self, x: [f64; 2]) -> Result<(), SpecfunError> {
        for f in self.list.constraints() {
            if !f.is_constant() && f.real_arg(x) <= 0.0 {
                return Err(SpecfunError::AnchorInfeasible { anchor: x[0], factor: f.label() });
            }
        }
        Ok(())
    }

    fn golden_line(&self, var: usize, x: [f64; 2]) -> Result<f64, SpecfunError> {
        let (lo, hi) = self.feasible_interval(var, x)?;
        let margin = MAX_MARGIN.min((hi - lo) / 4.0);
        let (mut a, mut b) = (lo + margin, hi - margin);
        let at = |c: f64| {
            let mut p = x;
            p[var] = c;
            let v = self.ln_abs_at(p);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        };
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c1 = b - g * (b - a);
        let mut c2 = a + g * (b - a);
        let mut f1 = at(c1);
        let mut f2 = at(c2);
        for _ in 0..48 {
            if (b - a) < 1e-6 * (1.0 + a.abs()) {
                break;
            }
            if f1 <= f2 {
                b = c2;
                c2 = c1;
                f2 = f1;
                c1 = b - g * (b - a);
                f1 = at(c1);
            } else {
                a = c1;
                c1 = c2;
                f1 = f2;
                c2 = a + g * (b - a);
                f2 = at(c2);
            }
        }
        // compare with the bracket ends: ln|f| need not be unimodal
        let mid = 0.5 * (a + b);
        let (lo_m, hi_m) = (lo + margin, hi - margin);
        let mut best = (at(mid), mid);
        for c in [lo_m, hi_m] {
            let v = at(c);
            if v < best.0 {
                best = (v, c);
            }
        }
        Ok(best.1)
    }

    /// Chebyshev centre of the feasible polygon in two variables.
    fn chebyshev_centre(&self) -> Result<[f64; 2], SpecfunError> {
        let mut rows: Vec<([f64; 2], f64)> =
            self.list.constraints().filter(|f| !f.is_constant()).map(|f| (f.coeff, f.offset)).collect();
        for v in 0..2 {
            let mut e = [0.0; 2];
            e[v] = 1.0;
            rows.push((e, BOX));
            e[v] = -1.0;
            rows.push((e, BOX));
        }
        let mut best: Option<([f64; 2], f64)> = None;
        let n = rows.len();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let m = [rows[i], rows[j], rows[k]];
                    // b·x - r|b| = -a
                    let a: Vec<[f64; 3]> = m.iter().map(|(b, _)| [b[0], b[1], -(b[0].hypot(b[1]))]).collect();
                    let rhs: Vec<f64> = m.iter().map(|(_, off)| -off).collect();
                    let Some(sol) = solve3(&a, &rhs) else { continue };
                    let (x, r) = ([sol[0], sol[1]], sol[2]);
                    let ok =
                        rows.iter().all(|(b, off)| off + b[0] * x[0] + b[1] * x[1] - r * b[0].hypot(b[1]) >= -1e-10);
                    if ok && best.map_or(true, |(_, br)| r > br) {
                        best = Some((x, r));
                    }
                }
            }
        }
        match best {
            Some((x, r)) if r > 0.0 => Ok(x),
            _ => {
                let labels: Vec<String> = self.list.constraints().map(|f| f.label()).collect();
                Err(SpecfunError::InseparablePoles {
                    left: labels.first().cloned().unwrap_or_default(),
                    right: labels[1..].join(", "),
                })
            }
        }
    }

    /// Contour anchors: user-supplied where given, saddle search otherwise.
    pub fn anchor(&self, spec: &ContourSpec) -> Result<[f64; 2], SpecfunError> {
        self.check_constants()?;
        let dims = self.dims();
        if dims == 1 {
            let x = match spec.anchor[0] {
                Some(a) => [a, 0.0],
                None => [self.golden_line(0, [0.0, 0.0])?, 0.0],
            };
            self.check_anchor(x)?;
            return Ok(x);
        }
        let mut x = match spec.anchor {
            [Some(a), Some(b)] => {
                let x = [a, b];
                self.check_anchor(x)?;
                return Ok(x);
            }
            _ => self.chebyshev_centre()?,
        };
        for (v, a) in spec.anchor.iter().enumerate() {
            if let Some(a) = a {
                x[v] = *a;
            }
        }
        // coordinate descent; a joint constraint can make it creep into a corner
        for _ in 0..ANCHOR_ROUNDS {
            let prev = x;
            for v in 0..2 {
                if spec.anchor[v].is_none() {
                    x[v] = self.golden_line(v, x)?;
                }
            }
            if (x[0] - prev[0]).abs().max((x[1] - prev[1]).abs()) < 1e-4 {
                break;
            }
        }
        self.check_anchor(x)?;
        Ok(x)
    }

    /// Distance from the anchor to the nearest pole along variable `var`.
    fn pole_distance(&self, var: usize, x: [f64; 2]) -> f64 {
        self.list
            .constraints()
            .filter(|f| f.coeff[var] != 0.0)
            .map(|f| f.real_arg(x) / f.coeff[var].abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest panel width that keeps oscillation per panel bounded at height `y`.
    fn panel_width(&self, var: usize, x: [f64; 2], y: f64) -> f64 {
        let mut omega = self.ln_z[var].abs();
        for f in self.list.numerator.iter().chain(&self.list.denominator).chain(&self.list.guards) {
            let c = f.coeff[var].abs();
            if c > 0.0 {
                let reach = f.real_arg(x).abs() + y * (f.coeff[0].abs() + f.coeff[1].abs());
                omega += c * (2.0 + reach).ln();
            }
        }
        if omega <= 0.0 {
            return MAX_PANEL;
        }
        MAX_PANEL.min(2.0 * PI * PERIODS_PER_PANEL / omega)
    }

    /// Panel edges on [0, t]: geometric near 0, then uniform.
    fn initial_edges(&self, var: usize, x: [f64; 2], t: f64) -> Vec<f64> {
        let w_max = self.panel_width(var, x, t);
        let first = self.pole_distance(var, x).min(w_max).max(1e-8);
        let mut edges = vec![0.0, first.min(t)];
        let mut width = first;
        while *edges.last().unwrap_or(&t) < t {
            width = (2.0 * width).min(w_max);
            let next = (edges[edges.len() - 1] + width).min(t);
            edges.push(next);
        }
        edges
    }

    fn extension_edges(&self, var: usize, x: [f64; 2], from: f64, to: f64) -> Vec<f64> {
        let w = self.panel_width(var, x, to);
        let n = ((to - from) / w).ceil().max(1.0) as usize;
        (0..=n).map(|k| from + (to - from) * k as f64 / n as f64).collect()
    }

    /// Separable log-part and multiplier at a point of variable `var`.
    fn separable(&self, var: usize, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let (s, t) = if var == 0 { (z, zero) } else { (zero, z) };
        let mut ln = self.ln_z[var] * z;
        for f in &self.list.numerator {
            if f.coeff[var] != 0.0 && !f.is_joint() {
                ln += ln_gamma_unchecked(f.arg(s, t));
            }
        }
        for f in &self.list.denominator {
            if f.coeff[var] != 0.0 && !f.is_joint() {
                ln -= ln_gamma_unchecked(f.arg(s, t));
            }
        }
        let mult = self.extra[var].map_or(Complex64::new(1.0, 0.0), |e| e(z));
        (ln, mult)
    }

    fn constant_ln(&self) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let mut ln = zero;
        for f in self.list.numerator.iter().filter(|f| f.is_constant()) {
            ln += ln_gamma_unchecked(f.arg(zero, zero));
        }
        for f in self.list.denominator.iter().filter(|f| f.is_constant()) {
            ln -= ln_gamma_unchecked(f.arg(zero, zero));
        }
        ln
    }

    fn nodes_on(&self, var: usize, anchor: f64, edges: &[f64], rule: &LegendreRule, sign: f64) -> Vec<Node> {
        let mut out = Vec::with_capacity(edges.len() * rule.len());
        for w in edges.windows(2) {
            for (y, wt) in rule.mapped(w[0], w[1]) {
                let y = sign * y;
                let (ln, mult) = self.separable(var, Complex64::new(anchor, y));
                out.push(Node { y, w: wt, ln, mult });
            }
        }
        out
    }

    /// Evaluate the integral, doubling the truncation until it settles.
    pub fn evaluate(&self, spec: &ContourSpec) -> Result<EvalResult, SpecfunError> {
        spec.validate()?;
        let anchor = self.anchor(spec)?;
        if self.dims() == 1 {
            Ok(self.evaluate_1d(spec, anchor))
        } else {
            Ok(self.evaluate_2d(spec, anchor))
        }
    }

    fn evaluate_1d(&self, spec: &ContourSpec, anchor: [f64; 2]) -> EvalResult {
        let rule = legendre(spec.nodes);
        let coarse = legendre(spec.nodes / 2);
        let c0 = self.constant_ln();
        let f = |y: f64| {
            let (ln, mult) = self.separable(0, Complex64::new(anchor[0], y));
            (ln + c0).exp() * mult
        };
        let panel_sum = |edges: &[f64]| {
            let mut fine = 0.0;
            let mut rough = 0.0;
            let mut abs = 0.0;
            for w in edges.windows(2) {
                for (y, wt) in rule.mapped(w[0], w[1]) {
                    let v = f(y);
                    fine += wt * v.re;
                    abs += wt * v.norm();
                }
                for (y, wt) in coarse.mapped(w[0], w[1]) {
                    rough += wt * f(y).re;
                }
            }
            (fine, rough, abs)
        };
        let mut t = spec.half_length;
        let (mut fine, mut rough, mut abs) = panel_sum(&self.initial_edges(0, anchor, t));
        let mut delta;
        let converged;
        loop {
            let t2 = 2.0 * t;
            let (df, dr, da) = panel_sum(&self.extension_edges(0, anchor, t, t2));
            fine += df;
            rough += dr;
            abs += da;
            delta = df.abs();
            t = t2;
            let floor = 100.0 * f64::EPSILON * abs;
            let tol = spec.abs_tol.max(spec.rel_tol * fine.abs()).max(floor);
            if delta <= tol {
                converged = true;
                break;
            }
            if 2.0 * t > spec.max_half_length {
                converged = false;
                break;
            }
        }
        let scale = 1.0 / PI;
        let err = (delta + (fine - rough).abs() + 100.0 * f64::EPSILON * abs) * scale;
        EvalResult {
            value: fine * scale,
            abs_err: err,
            converged,
            anchor,
            half_length: t,
            perturbation: None,
            l1: abs * scale,
        }
    }

    fn evaluate_2d(&self, spec: &ContourSpec, anchor: [f64; 2]) -> EvalResult {
        let rule = legendre(spec.nodes);
        let c0 = self.constant_ln();
        let joint: Vec<(GammaFactor, f64)> = self
            .list
            .numerator
            .iter()
            .filter(|f| f.is_joint())
            .map(|f| (*f, 1.0))
            .chain(self.list.denominator.iter().filter(|f| f.is_joint()).map(|f| (*f, -1.0)))
            .collect();
        let pair = |sn: &Node, tn: &Node| -> Complex64 {
            let s = Complex64::new(anchor[0], sn.y);
            let t = Complex64::new(anchor[1], tn.y);
            let mut ln = sn.ln + tn.ln + c0;
            for (f, sign) in &joint {
                ln += *sign * ln_gamma_unchecked(f.arg(s, t));
            }
            ln.exp() * sn.mult * tn.mult
        };

        let mut t_len = spec.half_length;
        let s_edges = self.initial_edges(0, anchor, t_len);
        let mut s_nodes = self.nodes_on(0, anchor[0], &s_edges, rule, 1.0);
        s_nodes.extend(self.nodes_on(0, anchor[0], &s_edges, rule, -1.0));
        let t_edges = self.initial_edges(1, anchor, t_len);
        let mut t_nodes = self.nodes_on(1, anchor[1], &t_edges, rule, 1.0);
        let mut inner: Vec<(Complex64, f64)> = t_nodes
            .iter()
            .map(|tn| {
                s_nodes.iter().fold((Complex64::new(0.0, 0.0), 0.0), |(acc, abs), sn| {
                    let v = sn.w * pair(sn, tn);
                    (acc + v, abs + v.norm())
                })
            })
            .collect();
        let total = |t_nodes: &[Node], inner: &[(Complex64, f64)]| {
            t_nodes.iter().zip(inner).fold((0.0, 0.0), |(v, a), (tn, (iv, ia))| (v + tn.w * iv.re, a + tn.w * ia))
        };
        let (mut value, _) = total(&t_nodes, &inner);
        let mut abs;
        let mut delta;
        let converged;
        loop {
            let t2 = 2.0 * t_len;
            let ext_s = self.extension_edges(0, anchor, t_len, t2);
            let mut new_s = self.nodes_on(0, anchor[0], &ext_s, rule, 1.0);
            new_s.extend(self.nodes_on(0, anchor[0], &ext_s, rule, -1.0));
            for (tn, acc) in t_nodes.iter().zip(inner.iter_mut()) {
                for sn in &new_s {
                    let v = sn.w * pair(sn, tn);
                    acc.0 += v;
                    acc.1 += v.norm();
                }
            }
            s_nodes.extend(new_s);
            let ext_t = self.extension_edges(1, anchor, t_len, t2);
            let new_t = self.nodes_on(1, anchor[1], &ext_t, rule, 1.0);
            for tn in &new_t {
                inner.push(s_nodes.iter().fold((Complex64::new(0.0, 0.0), 0.0), |(acc, a), sn| {
                    let v = sn.w * pair(sn, tn);
                    (acc + v, a + v.norm())
                }));
            }
            t_nodes.extend(new_t);
            let (v2, a2) = total(&t_nodes, &inner);
            delta = (v2 - value).abs();
            value = v2;
            abs = a2;
            t_len = t2;
            let floor = 100.0 * f64::EPSILON * abs;
            let tol = spec.abs_tol.max(spec.rel_tol * value.abs()).max(floor);
            if delta <= tol {
                converged = true;
                break;
            }
            if 2.0 * t_len > spec.max_half_length {
                converged = false;
                break;
            }
        }
        let scale = 1.0 / (2.0 * PI * PI);
        EvalResult {
            value: value * scale,
            abs_err: (delta + 100.0 * f64::EPSILON * abs) * scale,
            converged,
            anchor,
            half_length: t_len,
            perturbation: None,
            l1: abs * scale,
        }
    }
}

fn solve3(a: &[[f64; 3]], b: &[f64]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let m = [a[0], a[1], a[2]];
    let d = det(m);
    if d.abs() < 1e-14 {
        return None;
    }
    let mut out = [0.0; 3];
    for (col, slot) in out.iter_mut().enumerate() {
        let mut mc = m;
        for row in 0..3 {
            mc[row][col] = b[row];
        }
        *slot = det(mc) / d;
    }
    Some(out)
}

/// Meijer-G function `G^{m,n}_{p,q}(z | ·)` from its Gamma signature.
pub fn meijer_g(spec: &GammaFactorList, z: f64, contour: &ContourSpec) -> Result<EvalResult, SpecfunError> {
    if !(z > 0.0) {
        return Err(SpecfunError::Domain(format!("meijer_g: z = {z} must be positive")));
    }
    if spec.variables() != 1 {
        return Err(SpecfunError::Domain("meijer_g: signature uses two variables".into()));
    }
    MellinBarnes::new(spec, [z.ln(), 0.0]).evaluate(contour)
}

/// Bivariate Fox-H function with integrand `factors · z1^s z2^t`.
pub fn fox_h_bivariate(
    spec: &GammaFactorList,
    z1: f64,
    z2: f64,
    contour: &ContourSpec,
) -> Result<EvalResult, SpecfunError> {
    if !(z1 > 0.0) || !(z2 > 0.0) {
        return Err(SpecfunError::Domain(format!("fox_h_bivariate: z = ({z1}, {z2}) must be positive")));
    }
    MellinBarnes::new(spec, [z1.ln(), z2.ln()]).evaluate(contour)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::bessel_k;

    #[test]
    fn exponential_reduction() {
        let g = GammaFactorList::meijer_g(1, 0, &[], &[0.0]).unwrap();
        for x in [0.01, 0.5, 2.0, 10.0, 40.0] {
            let r = meijer_g(&g, x, &ContourSpec::default()).unwrap();
            let want = (-x).exp();
            assert!(r.converged);
            assert!((r.value - want).abs() <= 1e-9 * want, "x={x}: {} vs {want}", r.value);
        }
    }

    #[test]
    fn bessel_reduction() {
        let (a, b) = (1.3, 0.4);
        let g = GammaFactorList::meijer_g(2, 0, &[], &[a, b]).unwrap();
        for x in [0.05, 1.0, 7.0, 30.0] {
            let r = meijer_g(&g, x, &ContourSpec::default()).unwrap();
            let want = 2.0 * x.powf(0.5 * (a + b)) * bessel_k(a - b, 2.0 * x.sqrt()).unwrap();
            assert!((r.value - want).abs() <= 1e-9 * want, "x={x}: {} vs {want}", r.value);
        }
    }

    /// G^{2,1}_{1,2}(x | a; b1, b2) as a residue sum over the poles of Γ(b1-s)Γ(b2-s).
    fn g2112_residues(x: f64, a: f64, b1: f64, b2: f64) -> f64 {
        use statrs::function::gamma::gamma;
        let mut sum = 0.0;
        for (bj, bo) in [(b1, b2), (b2, b1)] {
            let mut fact = 1.0;
            for k in 0..80 {
                if k > 0 {
                    fact *= k as f64;
                }
                let s = bj + k as f64;
                let term =
                    (if k % 2 == 0 { 1.0 } else { -1.0 }) / fact * gamma(bo - s) * gamma(1.0 - a + s) * x.powf(s);
                sum += term;
            }
        }
        sum
    }

    #[test]
    fn distinct_parameter_residue_oracle() {
        let g = GammaFactorList::meijer_g(2, 1, &[0.5], &[0.0, 0.3]).unwrap();
        for x in [0.2, 1.0, 2.5] {
            let r = meijer_g(&g, x, &ContourSpec::default()).unwrap();
            let want = g2112_residues(x, 0.5, 0.0, 0.3);
            assert!((r.value - want).abs() < 1e-9 * want.abs(), "x={x}: {} vs {want}", r.value);
        }
    }

    #[test]
    fn coincident_poles_are_rejected() {
        let g = GammaFactorList::meijer_g(2, 1, &[1.0], &[0.0, 0.0]).unwrap();
        let err = meijer_g(&g, 1.0, &ContourSpec::default()).unwrap_err();
        assert!(matches!(err, SpecfunError::Degenerate { .. }), "{err}");
    }

    #[test]
    fn empty_strip_names_factor() {
        // Γ(-1 - s) Γ(0.3 + s): need s < -1 and s > -0.3
        let g = GammaFactorList::new().num(GammaFactor::s(-1.0, -1.0)).num(GammaFactor::s(0.3, 1.0));
        let err = meijer_g(&g, 1.0, &ContourSpec::default()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("Γ(-1 - s)") && msg.contains("Γ(0.3 + s)"), "{msg}");
    }

    #[test]
    fn anchor_outside_strip_is_rejected() {
        let g = GammaFactorList::meijer_g(1, 0, &[], &[0.0]).unwrap();
        let spec = ContourSpec::default().with_anchor([Some(0.5), None]);
        assert!(matches!(meijer_g(&g, 1.0, &spec), Err(SpecfunError::AnchorInfeasible { .. })));
    }

    #[test]
    fn small_node_count_rejected() {
        let g = GammaFactorList::meijer_g(1, 0, &[], &[0.0]).unwrap();
        let spec = ContourSpec { nodes: 16, ..ContourSpec::default() };
        assert!(matches!(meijer_g(&g, 1.0, &spec), Err(SpecfunError::InvalidContour(_))));
    }

    #[test]
    fn separable_bivariate_is_product() {
        // Γ(-s) Γ(-t) z1^s z2^t = e^{-z1} e^{-z2}
        let g = GammaFactorList::new().num(GammaFactor::s(0.0, -1.0)).num(GammaFactor::t(0.0, -1.0));
        let r = fox_h_bivariate(&g, 0.7, 1.9, &ContourSpec::default()).unwrap();
        let want = (-0.7f64 - 1.9).exp();
        assert!((r.value - want).abs() < 1e-9 * want, "{} vs {want}", r.value);
    }

    #[test]
    fn joint_factor_bivariate() {
        // (1/(2πi)^2)∬ Γ(-s)Γ(-t)Γ(1+s+t) z1^s z2^t = 1/(1+z1+z2)
        let g = GammaFactorList::new()
            .num(GammaFactor::s(0.0, -1.0))
            .num(GammaFactor::t(0.0, -1.0))
            .num(GammaFactor::new(1.0, 1.0, 1.0));
        for (z1, z2) in [(0.3, 0.5), (2.0, 0.1), (1.5, 4.0)] {
            let r = fox_h_bivariate(&g, z1, z2, &ContourSpec::default()).unwrap();
            let want = 1.0 / (1.0 + z1 + z2);
            assert!((r.value - want).abs() < 1e-8 * want, "({z1},{z2}): {} vs {want}", r.value);
            assert!(r.converged);
        }
    }

    #[test]
    fn contour_shift_invariance_2d() {
        let g = GammaFactorList::new()
            .num(GammaFactor::s(0.0, -1.0))
            .num(GammaFactor::t(0.0, -1.0))
            .num(GammaFactor::new(1.0, 1.0, 1.0));
        let base = fox_h_bivariate(&g, 0.8, 1.2, &ContourSpec::default()).unwrap();
        let [cs, ct] = base.anchor;
        for (ds, dt) in [(0.1, 0.0), (-0.1, 0.0), (0.0, 0.1), (0.0, -0.1)] {
            let spec = ContourSpec::default().with_anchor([Some(cs + ds), Some(ct + dt)]);
            let r = fox_h_bivariate(&g, 0.8, 1.2, &spec).unwrap();
            assert!((r.value - base.value).abs() <= base.abs_err + r.abs_err + 1e-14);
        }
    }

    #[test]
    fn labels() {
        assert_eq!(GammaFactor::new(0.5, -1.0, 0.5).label(), "Γ(0.5 - s + 0.5t)");
    }
}
