//! Prox-simple convex functions.
//!
//! A [`ProxFunction`] can be evaluated (as an extended real), has an exact scaled
//! proximal map `prox_{s F}(a) = argmin_u 1/2 ||u - a||^2 + s F(u)`, and exposes the
//! proximal map of its Fenchel conjugate, either in closed form or through the Moreau
//! identity `a = prox_{s F*}(a) + s prox_{F / s}(a / s)`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{check_len, Error, Result};
use crate::vecops::norm2;

/// Value in `R ∪ {+∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    /// `f64` view, with `+∞` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// Nonnegative scaling; `0 · (+∞)` is `+∞` (indicator convention).
    pub fn scale(self, s: f64) -> ExtReal {
        debug_assert!(s >= 0.0);
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(s * v),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }

    pub fn add(self, other: ExtReal) -> ExtReal {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::PosInf) => Some(Ordering::Less),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProxKind {
    Zero,
    /// Indicator of `[lo, hi]^dim`.
    BoxIndicator { lo: f64, hi: f64 },
    L1,
    /// Sum of Euclidean norms of consecutive blocks of `group_size` entries.
    GroupL21 { group_size: usize },
    /// `1/2 ||u - center||^2`.
    SquaredL2 { center: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProxFunction {
    dim: usize,
    kind: ProxKind,
}

impl ProxFunction {
    pub fn zero(dim: usize) -> Result<Self> {
        Self::with_kind(dim, ProxKind::Zero)
    }

    pub fn box_indicator(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "box bounds must be finite with lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Self::with_kind(dim, ProxKind::BoxIndicator { lo, hi })
    }

    pub fn l1(dim: usize) -> Result<Self> {
        Self::with_kind(dim, ProxKind::L1)
    }

    pub fn group_l21(dim: usize, group_size: usize) -> Result<Self> {
        if group_size == 0 || !dim.is_multiple_of(group_size) {
            return Err(Error::InvalidParameter(format!(
                "group size {group_size} does not divide dimension {dim}"
            )));
        }
        Self::with_kind(dim, ProxKind::GroupL21 { group_size })
    }

    pub fn squared_l2(center: Vec<f64>) -> Result<Self> {
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidParameter("center must be finite".into()));
        }
        Self::with_kind(center.len(), ProxKind::SquaredL2 { center })
    }

    fn with_kind(dim: usize, kind: ProxKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(Self { dim, kind })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &ProxKind {
        &self.kind
    }

    pub fn eval(&self, u: &[f64]) -> Result<ExtReal> {
        check_len("prox function eval", self.dim, u.len())?;
        Ok(self.eval_unchecked(u))
    }

    pub(crate) fn eval_unchecked(&self, u: &[f64]) -> ExtReal {
        match &self.kind {
            ProxKind::Zero => ExtReal::ZERO,
            ProxKind::BoxIndicator { lo, hi } => {
                if u.iter().all(|x| *lo <= *x && *x <= *hi) {
                    ExtReal::ZERO
                } else {
                    ExtReal::PosInf
                }
            }
            ProxKind::L1 => ExtReal::Finite(u.iter().map(|x| x.abs()).sum()),
            ProxKind::GroupL21 { group_size } => {
                ExtReal::Finite(u.chunks(*group_size).map(norm2).sum())
            }
            ProxKind::SquaredL2 { center } => ExtReal::Finite(
                0.5 * u
                    .iter()
                    .zip(center)
                    .map(|(x, c)| (x - c) * (x - c))
                    .sum::<f64>(),
            ),
        }
    }

    /// Fenchel conjugate `F*(xi) = sup_u <xi, u> - F(u)`.
    pub fn conjugate_eval(&self, xi: &[f64]) -> Result<ExtReal> {
        check_len("conjugate eval", self.dim, xi.len())?;
        Ok(match &self.kind {
            ProxKind::Zero => indicator(xi.iter().all(|x| *x == 0.0)),
            ProxKind::BoxIndicator { lo, hi } => {
                ExtReal::Finite(xi.iter().map(|x| (lo * x).max(hi * x)).sum())
            }
            ProxKind::L1 => indicator(xi.iter().all(|x| x.abs() <= 1.0)),
            ProxKind::GroupL21 { group_size } => {
                indicator(xi.chunks(*group_size).all(|b| norm2(b) <= 1.0))
            }
            ProxKind::SquaredL2 { center } => ExtReal::Finite(
                xi.iter()
                    .zip(center)
                    .map(|(x, c)| 0.5 * x * x + x * c)
                    .sum(),
            ),
        })
    }

    /// Whether `dom(F*)` is bounded (true for norms and the zero function).
    pub fn conjugate_domain_bounded(&self) -> bool {
        matches!(
            self.kind,
            ProxKind::Zero | ProxKind::L1 | ProxKind::GroupL21 { .. }
        )
    }

    pub fn prox(&self, scale: f64, a: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.prox_into(scale, a, &mut out)?;
        Ok(out)
    }

    pub fn prox_into(&self, scale: f64, a: &[f64], out: &mut [f64]) -> Result<()> {
        check_scale(scale)?;
        check_len("prox input", self.dim, a.len())?;
        check_len("prox output", self.dim, out.len())?;
        self.prox_unchecked(scale, a, out);
        Ok(())
    }

    fn prox_unchecked(&self, scale: f64, a: &[f64], out: &mut [f64]) {
        match &self.kind {
            ProxKind::Zero => out.copy_from_slice(a),
            ProxKind::BoxIndicator { lo, hi } => {
                for (o, x) in out.iter_mut().zip(a) {
                    *o = x.clamp(*lo, *hi);
                }
            }
            ProxKind::L1 => {
                for (o, x) in out.iter_mut().zip(a) {
                    *o = soft_threshold(*x, scale);
                }
            }
            ProxKind::GroupL21 { group_size } => {
                for (ob, ab) in out.chunks_mut(*group_size).zip(a.chunks(*group_size)) {
                    let n = norm2(ab);
                    let shrink = if n > 0.0 { (1.0 - scale / n).max(0.0) } else { 0.0 };
                    for (o, x) in ob.iter_mut().zip(ab) {
                        *o = shrink * x;
                    }
                }
            }
            ProxKind::SquaredL2 { center } => {
                for ((o, x), c) in out.iter_mut().zip(a).zip(center) {
                    *o = (x + scale * c) / (1.0 + scale);
                }
            }
        }
    }

    /// `prox_{scale F*}(a)`, in closed form where the conjugate is simple.
    ///
    /// For `l1` and `group_l21` this is a projection onto the dual-norm unit ball and
    /// always returns a point with `F*(out) = 0`.
    pub fn conjugate_prox(&self, scale: f64, a: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim];
        self.conjugate_prox_into(scale, a, &mut out)?;
        Ok(out)
    }

    pub fn conjugate_prox_into(&self, scale: f64, a: &[f64], out: &mut [f64]) -> Result<()> {
        check_scale(scale)?;
        check_len("conjugate prox input", self.dim, a.len())?;
        check_len("conjugate prox output", self.dim, out.len())?;
        match &self.kind {
            ProxKind::Zero => out.iter_mut().for_each(|o| *o = 0.0),
            ProxKind::L1 => {
                for (o, x) in out.iter_mut().zip(a) {
                    *o = x.clamp(-1.0, 1.0);
                }
            }
            ProxKind::GroupL21 { group_size } => {
                out.copy_from_slice(a);
                for block in out.chunks_mut(*group_size) {
                    project_unit_ball(block);
                }
            }
            ProxKind::SquaredL2 { center } => {
                for ((o, x), c) in out.iter_mut().zip(a).zip(center) {
                    *o = (x - scale * c) / (1.0 + scale);
                }
            }
            ProxKind::BoxIndicator { .. } => self.moreau_conjugate(scale, a, out),
        }
        Ok(())
    }

    /// `prox_{scale F*}(a) = a - scale prox_{F / scale}(a / scale)`.
    pub fn conjugate_prox_moreau(&self, scale: f64, a: &[f64]) -> Result<Vec<f64>> {
        check_scale(scale)?;
        check_len("conjugate prox input", self.dim, a.len())?;
        let mut out = vec![0.0; self.dim];
        self.moreau_conjugate(scale, a, &mut out);
        Ok(out)
    }

    fn moreau_conjugate(&self, scale: f64, a: &[f64], out: &mut [f64]) {
        let scaled: Vec<f64> = a.iter().map(|x| x / scale).collect();
        self.prox_unchecked(1.0 / scale, &scaled, out);
        for (o, x) in out.iter_mut().zip(a) {
            *o = x - scale * *o;
        }
    }
}

fn indicator(inside: bool) -> ExtReal {
    if inside {
        ExtReal::ZERO
    } else {
        ExtReal::PosInf
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "prox scale must be positive and finite, got {scale}"
        )))
    }
}

#[inline]
pub fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Radial projection onto the closed unit Euclidean ball; the result never has norm > 1.
pub fn project_unit_ball(block: &mut [f64]) {
    let n = norm2(block);
    if n <= 1.0 {
        return;
    }
    let original = block.to_vec();
    let mut factor = 1.0 / n;
    loop {
        for (b, o) in block.iter_mut().zip(&original) {
            *b = o * factor;
        }
        if norm2(block) <= 1.0 {
            return;
        }
        factor *= 1.0 - f64::EPSILON;
    }
}

/// Exhaustive grid minimizer of `1/2 ||u - a||^2 + scale F(u)`.
///
/// The grid is `a + k * grid_step` for integer `k` with `|k * grid_step| <= grid_radius`
/// in every coordinate. Meant as a test oracle; refuses `dim > 3`.
pub fn prox_oracle(
    f: &ProxFunction,
    scale: f64,
    a: &[f64],
    grid_radius: f64,
    grid_step: f64,
) -> Result<Vec<f64>> {
    check_scale(scale)?;
    check_len("prox oracle input", f.dim(), a.len())?;
    if f.dim() > 3 {
        return Err(Error::Unsupported(format!(
            "grid prox oracle in dimension {}",
            f.dim()
        )));
    }
    if !(grid_step > 0.0 && grid_radius >= 0.0) {
        return Err(Error::InvalidParameter(
            "grid step must be positive and radius nonnegative".into(),
        ));
    }
    let dim = f.dim();
    let k_max = (grid_radius / grid_step + 1e-9).floor() as i64;
    let offset = |k: i64| k as f64 * grid_step;

    // odometer over k ∈ [-k_max, k_max]^dim
    let mut ks = [-k_max; 3];
    let mut u = [0.0f64; 3];
    for c in 0..dim {
        u[c] = a[c] + offset(ks[c]);
    }
    let mut best = (f64::INFINITY, vec![0.0; dim]);
    loop {
        if let Some(fv) = f.eval_unchecked(&u[..dim]).finite() {
            let quad: f64 = u[..dim]
                .iter()
                .zip(a)
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            let obj = 0.5 * quad + scale * fv;
            if obj < best.0 {
                best = (obj, u[..dim].to_vec());
            }
        }
        let mut c = 0;
        loop {
            if c == dim {
                return Ok(best.1);
            }
            if ks[c] < k_max {
                ks[c] += 1;
                u[c] = a[c] + offset(ks[c]);
                break;
            }
            ks[c] = -k_max;
            u[c] = a[c] + offset(ks[c]);
            c += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecops::{dot, max_abs_diff};
    use proptest::prelude::*;

    fn all_kinds(dim: usize) -> Vec<ProxFunction> {
        let center: Vec<f64> = (0..dim).map(|i| 0.3 - 0.2 * i as f64).collect();
        let mut v = vec![
            ProxFunction::zero(dim).unwrap(),
            ProxFunction::box_indicator(dim, -0.5, 1.0).unwrap(),
            ProxFunction::l1(dim).unwrap(),
            ProxFunction::squared_l2(center).unwrap(),
        ];
        if dim % 2 == 0 {
            v.push(ProxFunction::group_l21(dim, 2).unwrap());
        } else {
            v.push(ProxFunction::group_l21(dim, 1).unwrap());
        }
        v
    }

    #[test]
    fn eval_examples() {
        let l1 = ProxFunction::l1(2).unwrap();
        assert_eq!(l1.eval(&[3.0, -4.0]).unwrap(), ExtReal::Finite(7.0));
        let bx = ProxFunction::box_indicator(2, 0.0, 1.0).unwrap();
        assert_eq!(bx.eval(&[0.5, 1.0]).unwrap(), ExtReal::ZERO);
        assert_eq!(bx.eval(&[1.1, 0.0]).unwrap(), ExtReal::PosInf);
        let g = ProxFunction::group_l21(4, 2).unwrap();
        assert_eq!(g.eval(&[3.0, 4.0, 0.0, 0.0]).unwrap(), ExtReal::Finite(5.0));
        assert!(g.eval(&[1.0]).is_err());
    }

    #[test]
    fn box_membership_is_strict() {
        let bx = ProxFunction::box_indicator(1, 0.0, 1.0).unwrap();
        assert_eq!(bx.eval(&[1.0 + f64::EPSILON]).unwrap(), ExtReal::PosInf);
        assert_eq!(bx.eval(&[-1e-300]).unwrap(), ExtReal::PosInf);
    }

    #[test]
    fn prox_examples() {
        let z = ProxFunction::zero(2).unwrap();
        assert_eq!(z.prox(3.0, &[2.0, -7.0]).unwrap(), vec![2.0, -7.0]);
        let l1 = ProxFunction::l1(2).unwrap();
        assert_eq!(l1.prox(1.0, &[3.0, -0.5]).unwrap(), vec![2.0, 0.0]);
        let g = ProxFunction::group_l21(2, 2).unwrap();
        let p = g.prox(1.0, &[3.0, 4.0]).unwrap();
        assert!(max_abs_diff(&p, &[2.4, 3.2]) < 1e-15);
        assert!(l1.prox(0.0, &[1.0, 1.0]).is_err());
        assert!(l1.prox(-1.0, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn group_prox_matches_grid_oracle() {
        let g = ProxFunction::group_l21(2, 2).unwrap();
        let oracle = prox_oracle(&g, 1.0, &[3.0, 4.0], 1.2, 1e-3).unwrap();
        assert!(max_abs_diff(&oracle, &[2.4, 3.2]) <= 1e-3, "{oracle:?}");
    }

    #[test]
    fn conjugate_prox_examples() {
        let l1 = ProxFunction::l1(2).unwrap();
        let c = l1.conjugate_prox(2.0, &[3.0, -0.4]).unwrap();
        assert_eq!(c, vec![1.0, -0.4]);
        let m = l1.conjugate_prox_moreau(2.0, &[3.0, -0.4]).unwrap();
        assert!(max_abs_diff(&m, &c) < 1e-12);

        let g = ProxFunction::group_l21(2, 2).unwrap();
        for s in [0.1, 1.0, 7.0] {
            let c = g.conjugate_prox(s, &[3.0, 4.0]).unwrap();
            assert!(max_abs_diff(&c, &[0.6, 0.8]) < 1e-15);
            assert!(norm2(&c) <= 1.0);
        }

        let z = ProxFunction::zero(1).unwrap();
        assert_eq!(z.conjugate_prox(1.0, &[5.0]).unwrap(), vec![0.0]);
    }

    #[test]
    fn oracle_examples() {
        let l1 = ProxFunction::l1(1).unwrap();
        let p = prox_oracle(&l1, 1.0, &[3.0], 5.0, 1e-3).unwrap();
        assert!((p[0] - 2.0).abs() <= 1e-3);
        let bx = ProxFunction::box_indicator(1, 0.0, 1.0).unwrap();
        let p = prox_oracle(&bx, 7.0, &[-2.0], 5.0, 1e-3).unwrap();
        assert!(p[0].abs() <= 1e-3);
        let sq = ProxFunction::squared_l2(vec![0.0]).unwrap();
        let p = prox_oracle(&sq, 1.0, &[4.0], 5.0, 1e-3).unwrap();
        assert!((p[0] - 2.0).abs() <= 1e-3);
        let big = ProxFunction::l1(4).unwrap();
        assert!(matches!(
            prox_oracle(&big, 1.0, &[0.0; 4], 1.0, 0.1),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn project_unit_ball_never_leaves_ball() {
        let mut b = [1e10 / 3.0, -7.0 / 3.0, 0.1];
        project_unit_ball(&mut b);
        assert!(norm2(&b) <= 1.0);
        let mut inside = [0.3, 0.4];
        project_unit_ball(&mut inside);
        assert_eq!(inside, [0.3, 0.4]);
    }

    #[test]
    fn ext_real_ordering() {
        assert!(ExtReal::Finite(1e300) < ExtReal::PosInf);
        assert!(ExtReal::Finite(-1.0) < ExtReal::ZERO);
        assert_eq!(ExtReal::PosInf.to_f64(), f64::INFINITY);
        assert_eq!(ExtReal::Finite(2.0).add(ExtReal::PosInf), ExtReal::PosInf);
    }

    fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5.0f64..5.0, n)
    }

    proptest! {
        #[test]
        fn moreau_identity(scale in 0.01f64..20.0, a in vec_strategy(4)) {
            for f in all_kinds(4) {
                let p = f.prox(scale, &a).unwrap();
                let scaled: Vec<f64> = a.iter().map(|x| x / scale).collect();
                let c = f.conjugate_prox(1.0 / scale, &scaled).unwrap();
                for i in 0..4 {
                    let recon = p[i] + scale * c[i];
                    prop_assert!((recon - a[i]).abs() <= 1e-10 * (1.0 + a[i].abs()),
                        "{:?}: {} vs {}", f.kind(), recon, a[i]);
                }
            }
        }

        #[test]
        fn direct_and_moreau_conjugate_prox_agree(scale in 0.01f64..20.0, a in vec_strategy(6)) {
            for f in all_kinds(6) {
                let direct = f.conjugate_prox(scale, &a).unwrap();
                let moreau = f.conjugate_prox_moreau(scale, &a).unwrap();
                prop_assert!(max_abs_diff(&direct, &moreau) <= 1e-12 * (1.0 + scale),
                    "{:?}", f.kind());
            }
        }

        #[test]
        fn prox_is_firmly_nonexpansive(scale in 0.01f64..10.0, a in vec_strategy(4), b in vec_strategy(4)) {
            for f in all_kinds(4) {
                let pa = f.prox(scale, &a).unwrap();
                let pb = f.prox(scale, &b).unwrap();
                let d: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x - y).collect();
                let e: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
                prop_assert!(dot(&d, &d) <= dot(&d, &e) + 1e-12, "{:?}", f.kind());
            }
        }

        #[test]
        fn box_prox_is_scale_invariant(s1 in 0.01f64..100.0, s2 in 0.01f64..100.0, a in vec_strategy(3)) {
            let bx = ProxFunction::box_indicator(3, -1.0, 2.0).unwrap();
            prop_assert_eq!(bx.prox(s1, &a).unwrap(), bx.prox(s2, &a).unwrap());
        }

        #[test]
        fn conjugate_prox_of_norms_is_feasible(scale in 0.01f64..10.0, a in vec_strategy(6)) {
            for f in [ProxFunction::l1(6).unwrap(), ProxFunction::group_l21(6, 3).unwrap()] {
                let c = f.conjugate_prox(scale, &a).unwrap();
                prop_assert_eq!(f.conjugate_eval(&c).unwrap(), ExtReal::ZERO);
            }
        }
    }
}
