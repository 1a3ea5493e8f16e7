use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::polytope::{cross_vectors, dedup, polar_vertices, sign_vectors, symmetrize, vertices_of};
use super::{check_dim, dot, MetricsError, RANK_TOL};

/// Largest dimension for which `l1`/`l_inf` balls are expanded into explicit
/// vertex and facet lists.
const MAX_EXPAND_DIM: usize = 16;
/// Consistency slack for user-supplied polyhedral descriptions.
const DESC_TOL: f64 = 1e-7;

/// A norm on `R^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "serde_json::Value", into = "NormFile")]
pub enum NormSpec {
    /// `l_p`, with `p = f64::INFINITY` for the sup norm.
    P { dim: usize, p: f64 },
    /// Symmetric polytope ball `conv(vertices) = {x : a.x <= 1 for a in facets}`.
    Polyhedral { dim: usize, vertices: Vec<Vec<f64>>, facets: Vec<Vec<f64>> },
    /// `x -> codomain(map x)` for an injective `map` given by rows.
    Pushforward { map: Vec<Vec<f64>>, codomain: Box<NormSpec> },
    /// Max of the parts on consecutive coordinate blocks.
    MaxSum(Vec<NormSpec>),
}

impl NormSpec {
    pub fn p(dim: usize, p: f64) -> Result<Self, MetricsError> {
        if dim == 0 {
            return Err(MetricsError::InvalidNorm("dimension must be positive".into()));
        }
        if !(p >= 1.0) {
            return Err(MetricsError::InvalidNorm(format!("p = {p} is below 1")));
        }
        Ok(NormSpec::P { dim, p })
    }

    pub fn l1(dim: usize) -> Self {
        NormSpec::P { dim, p: 1.0 }
    }

    pub fn l2(dim: usize) -> Self {
        NormSpec::P { dim, p: 2.0 }
    }

    pub fn linf(dim: usize) -> Self {
        NormSpec::P { dim, p: f64::INFINITY }
    }

    /// The norm whose ball is the symmetric hull of `points`. Interior points
    /// are dropped.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self, MetricsError> {
        let dim = points.first().map(Vec::len).ok_or_else(|| MetricsError::InvalidNorm("no points".into()))?;
        let facets = polar_vertices(&symmetrize(points), dim)?;
        let vertices = vertices_of(&facets, dim)?;
        Ok(NormSpec::Polyhedral { dim, vertices, facets })
    }

    /// The norm whose ball is `{x : |a.x| <= 1}` over the given functionals.
    pub fn from_functionals(functionals: &[Vec<f64>]) -> Result<Self, MetricsError> {
        let dim = functionals.first().map(Vec::len).ok_or_else(|| MetricsError::InvalidNorm("no functionals".into()))?;
        let vertices = vertices_of(&symmetrize(functionals), dim)?;
        let facets = polar_vertices(&vertices, dim)?;
        Ok(NormSpec::Polyhedral { dim, vertices, facets })
    }

    /// Checks a user-supplied vertex/facet pair for symmetry and agreement.
    pub fn polyhedral(dim: usize, vertices: Vec<Vec<f64>>, facets: Vec<Vec<f64>>) -> Result<Self, MetricsError> {
        for v in vertices.iter().chain(&facets) {
            check_dim(dim, v.len())?;
        }
        let symmetric = |set: &[Vec<f64>]| {
            set.iter().all(|v| set.iter().any(|w| v.iter().zip(w).all(|(a, b)| (a + b).abs() <= DESC_TOL)))
        };
        if !symmetric(&vertices) || !symmetric(&facets) {
            return Err(MetricsError::InvalidNorm("ball is not symmetric".into()));
        }
        let rank = |set: &[Vec<f64>]| {
            if set.is_empty() {
                return 0;
            }
            DMatrix::from_fn(set.len(), dim, |i, j| set[i][j]).rank(1e-9)
        };
        if rank(&vertices) < dim || rank(&facets) < dim {
            return Err(MetricsError::InvalidNorm("ball is not full-dimensional or not bounded".into()));
        }
        for v in &vertices {
            let g = facets.iter().map(|a| dot(a, v)).fold(f64::NEG_INFINITY, f64::max);
            if (g - 1.0).abs() > DESC_TOL {
                return Err(MetricsError::InvalidNorm(format!("vertex {v:?} has facet gauge {g}")));
            }
        }
        for a in &facets {
            let s = vertices.iter().map(|v| dot(a, v)).fold(f64::NEG_INFINITY, f64::max);
            if (s - 1.0).abs() > DESC_TOL {
                return Err(MetricsError::InvalidNorm(format!("facet {a:?} has support {s}")));
            }
        }
        Ok(NormSpec::Polyhedral { dim, vertices, facets })
    }

    pub fn pushforward(map: Vec<Vec<f64>>, codomain: NormSpec) -> Result<Self, MetricsError> {
        check_dim(codomain.dim(), map.len())?;
        let k = map.first().map_or(0, Vec::len);
        if k == 0 || map.iter().any(|r| r.len() != k) {
            return Err(MetricsError::InvalidNorm("ragged or empty map".into()));
        }
        if rank_of(&rows_to_matrix(&map)) < k {
            return Err(MetricsError::NotInjective);
        }
        Ok(NormSpec::Pushforward { map, codomain: Box::new(codomain) })
    }

    pub fn max_sum(parts: Vec<NormSpec>) -> Result<Self, MetricsError> {
        if parts.is_empty() {
            return Err(MetricsError::InvalidNorm("empty sum".into()));
        }
        Ok(NormSpec::MaxSum(parts))
    }

    /// `lp:dim` shorthand: `l1:2`, `l2:3`, `linf:2`, `l3.5:4`.
    pub fn parse_shorthand(s: &str) -> Result<Self, MetricsError> {
        let bad = || MetricsError::Parse(format!("expected lP:DIM, got {s:?}"));
        let (p, dim) = s.trim().split_once(':').ok_or_else(bad)?;
        let p = p.strip_prefix('l').ok_or_else(bad)?;
        let p = if p == "inf" { f64::INFINITY } else { p.parse::<f64>().map_err(|_| bad())? };
        let dim = dim.parse::<usize>().map_err(|_| bad())?;
        NormSpec::p(dim, p)
    }

    pub fn parse_json(text: &str) -> Result<Self, MetricsError> {
        serde_json::from_str(text).map_err(|e| MetricsError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("norms serialize")
    }

    pub fn dim(&self) -> usize {
        match self {
            NormSpec::P { dim, .. } | NormSpec::Polyhedral { dim, .. } => *dim,
            NormSpec::Pushforward { map, .. } => map.first().map_or(0, Vec::len),
            NormSpec::MaxSum(parts) => parts.iter().map(NormSpec::dim).sum(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64, MetricsError> {
        check_dim(self.dim(), x.len())?;
        Ok(match self {
            NormSpec::P { p, .. } => p_norm(x, *p),
            NormSpec::Polyhedral { facets, .. } => facets.iter().map(|a| dot(a, x)).fold(0.0, f64::max),
            NormSpec::Pushforward { map, codomain } => codomain.eval(&apply_rows(map, x))?,
            NormSpec::MaxSum(parts) => {
                let mut best = 0.0f64;
                let mut at = 0;
                for part in parts {
                    let d = part.dim();
                    best = best.max(part.eval(&x[at..at + d])?);
                    at += d;
                }
                best
            }
        })
    }

    /// Dual norm `sup { f.x : ||x|| <= 1 }`.
    pub fn dual_eval(&self, f: &[f64]) -> Result<f64, MetricsError> {
        check_dim(self.dim(), f.len())?;
        match self {
            NormSpec::P { p, .. } => Ok(p_norm(f, conjugate(*p))),
            NormSpec::Polyhedral { vertices, .. } => Ok(vertices.iter().map(|v| dot(v, f)).fold(0.0, f64::max)),
            NormSpec::MaxSum(parts) => {
                let mut total = 0.0;
                let mut at = 0;
                for part in parts {
                    let d = part.dim();
                    total += part.dual_eval(&f[at..at + d])?;
                    at += d;
                }
                Ok(total)
            }
            NormSpec::Pushforward { .. } => {
                if let Some(a) = self.euclidean_form() {
                    // f^t (A^t A)^{-1} f
                    let gram = a.transpose() * &a;
                    let chol = gram.cholesky().ok_or(MetricsError::NotInjective)?;
                    let fv = DVector::from_column_slice(f);
                    let y = chol.solve(&fv);
                    return Ok(fv.dot(&y).max(0.0).sqrt());
                }
                let vertices = self.vertices().ok_or_else(|| MetricsError::DualNotComputable(self.describe()))?;
                Ok(vertices.iter().map(|v| dot(v, f)).fold(0.0, f64::max))
            }
        }
    }

    /// The dual norm as a spec, when it has one of the supported shapes.
    pub fn dual(&self) -> Result<NormSpec, MetricsError> {
        match self {
            NormSpec::P { dim, p } => Ok(NormSpec::P { dim: *dim, p: conjugate(*p) }),
            NormSpec::Polyhedral { dim, vertices, facets } => {
                Ok(NormSpec::Polyhedral { dim: *dim, vertices: facets.clone(), facets: vertices.clone() })
            }
            _ => {
                if let Some(a) = self.euclidean_form() {
                    // f -> ||A (A^t A)^{-1} f||_2
                    let gram = a.transpose() * &a;
                    let inv = gram.try_inverse().ok_or(MetricsError::NotInjective)?;
                    let l = &a * inv;
                    return NormSpec::pushforward(matrix_to_rows(&l), NormSpec::l2(a.nrows()));
                }
                match self.to_polyhedral() {
                    Some(NormSpec::Polyhedral { dim, vertices, facets }) => {
                        Ok(NormSpec::Polyhedral { dim, vertices: facets, facets: vertices })
                    }
                    _ => Err(MetricsError::DualNotComputable(self.describe())),
                }
            }
        }
    }

    /// A symmetric list of functionals `a` with `||x|| = max a.x`, when the
    /// ball is a polytope.
    pub fn facets(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            NormSpec::P { dim, p } if *p == 1.0 && *dim <= MAX_EXPAND_DIM => Some(sign_vectors(*dim)),
            NormSpec::P { dim, p } if p.is_infinite() => Some(cross_vectors(*dim)),
            NormSpec::P { .. } => None,
            NormSpec::Polyhedral { facets, .. } => Some(facets.clone()),
            NormSpec::Pushforward { map, codomain } => {
                let k = self.dim();
                let pulled: Vec<Vec<f64>> = codomain
                    .facets()?
                    .iter()
                    .map(|c| (0..k).map(|j| map.iter().zip(c).map(|(row, ci)| row[j] * ci).sum()).collect::<Vec<f64>>())
                    .filter(|a: &Vec<f64>| a.iter().any(|&x| x != 0.0))
                    .collect();
                Some(dedup(pulled))
            }
            NormSpec::MaxSum(parts) => {
                let n = self.dim();
                let mut out = Vec::new();
                let mut at = 0;
                for part in parts {
                    let d = part.dim();
                    for a in part.facets()? {
                        let mut v = vec![0.0; n];
                        v[at..at + d].copy_from_slice(&a);
                        out.push(v);
                    }
                    at += d;
                }
                Some(out)
            }
        }
    }

    /// Vertices of the unit ball, when it is a polytope.
    pub fn vertices(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            NormSpec::P { dim, p } if *p == 1.0 => Some(cross_vectors(*dim)),
            NormSpec::P { dim, p } if p.is_infinite() && *dim <= MAX_EXPAND_DIM => Some(sign_vectors(*dim)),
            NormSpec::P { .. } => None,
            NormSpec::Polyhedral { vertices, .. } => Some(vertices.clone()),
            _ => vertices_of(&self.facets()?, self.dim()).ok(),
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        match self {
            NormSpec::P { p, .. } => *p == 1.0 || p.is_infinite(),
            NormSpec::Polyhedral { .. } => true,
            NormSpec::Pushforward { codomain, .. } => codomain.is_polyhedral(),
            NormSpec::MaxSum(parts) => parts.iter().all(NormSpec::is_polyhedral),
        }
    }

    /// Equivalent explicit vertex/facet description, for polytope balls.
    pub fn to_polyhedral(&self) -> Option<NormSpec> {
        if let NormSpec::Polyhedral { .. } = self {
            return Some(self.clone());
        }
        if !self.is_polyhedral() {
            return None;
        }
        let dim = self.dim();
        let vertices = self.vertices()?;
        let facets = match self {
            NormSpec::P { .. } => self.facets()?,
            _ => polar_vertices(&vertices, dim).ok()?,
        };
        Some(NormSpec::Polyhedral { dim, vertices, facets })
    }

    /// `A` with `||x|| = ||A x||_2`, for Euclidean-type norms.
    pub fn euclidean_form(&self) -> Option<DMatrix<f64>> {
        match self {
            NormSpec::P { dim, p } if *p == 2.0 => Some(DMatrix::identity(*dim, *dim)),
            NormSpec::Pushforward { map, codomain } => Some(codomain.euclidean_form()? * rows_to_matrix(map)),
            _ => None,
        }
    }

    /// A point of the unit ball maximizing `f`.
    pub fn support(&self, f: &[f64]) -> Result<Vec<f64>, MetricsError> {
        check_dim(self.dim(), f.len())?;
        let k = f.len();
        if let NormSpec::P { p, .. } = self {
            let p = *p;
            let i_max = (0..k).fold(0, |b, i| if f[i].abs() > f[b].abs() { i } else { b });
            if p == 1.0 {
                let mut x = vec![0.0; k];
                x[i_max] = if f[i_max] < 0.0 { -1.0 } else { 1.0 };
                return Ok(x);
            }
            if p.is_infinite() {
                return Ok(f.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect());
            }
            let q = conjugate(p);
            let nq = p_norm(f, q);
            if nq == 0.0 {
                let mut x = vec![0.0; k];
                x[0] = 1.0;
                return Ok(x);
            }
            return Ok(f.iter().map(|&v| v.signum() * (v.abs() / nq).powf(q - 1.0)).collect());
        }
        if let Some(a) = self.euclidean_form() {
            let gram = a.transpose() * &a;
            let chol = gram.cholesky().ok_or(MetricsError::NotInjective)?;
            let y = chol.solve(&DVector::from_column_slice(f));
            let s = DVector::from_column_slice(f).dot(&y).max(0.0).sqrt();
            if s == 0.0 {
                let mut x = vec![0.0; k];
                x[0] = 1.0;
                let n = self.eval(&x)?;
                x[0] = 1.0 / n;
                return Ok(x);
            }
            return Ok(y.iter().map(|v| v / s).collect());
        }
        let vertices = self.vertices().ok_or_else(|| MetricsError::DualNotComputable(self.describe()))?;
        let mut best = 0;
        for (i, v) in vertices.iter().enumerate() {
            if dot(v, f) > dot(&vertices[best], f) {
                best = i;
            }
        }
        Ok(vertices[best].clone())
    }

    pub fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormSpec::P { dim, p } if p.is_infinite() => write!(f, "linf:{dim}"),
            NormSpec::P { dim, p } => write!(f, "l{p}:{dim}"),
            NormSpec::Polyhedral { dim, vertices, facets } => {
                write!(f, "polyhedral:{dim}({} vertices, {} facets)", vertices.len(), facets.len())
            }
            NormSpec::Pushforward { codomain, .. } => write!(f, "pushforward:{}({codomain})", self.dim()),
            NormSpec::MaxSum(parts) => {
                write!(f, "max(")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for NormSpec {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NormSpec::parse_shorthand(s)
    }
}

pub(crate) fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

pub(crate) fn p_norm(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if p.is_infinite() || m == 0.0 {
        return m;
    }
    if p == 1.0 {
        return x.iter().map(|v| v.abs()).sum();
    }
    if p == 2.0 {
        return x.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

pub(crate) fn apply_rows(rows: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    rows.iter().map(|r| dot(r, x)).collect()
}

pub(crate) fn rows_to_matrix(rows: &[Vec<f64>]) -> DMatrix<f64> {
    let c = rows.first().map_or(0, Vec::len);
    DMatrix::from_fn(rows.len(), c, |i, j| rows[i][j])
}

pub(crate) fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Numerical rank with singular values relative to the largest.
pub(crate) fn rank_of(m: &DMatrix<f64>) -> usize {
    if m.is_empty() {
        return 0;
    }
    let s = m.clone().svd(false, false).singular_values;
    let top = s.max();
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > RANK_TOL * top).count()
}

#[derive(Serialize, Deserialize)]
struct NormFile {
    dim: usize,
    variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    facets: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    map: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    codomain: Option<Box<NormSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    parts: Option<Vec<NormSpec>>,
}

/// Either shorthand such as `"l1:3"` or a full object.
impl TryFrom<serde_json::Value> for NormSpec {
    type Error = MetricsError;

    fn try_from(v: serde_json::Value) -> Result<Self, Self::Error> {
        match v {
            serde_json::Value::String(s) => NormSpec::parse_shorthand(&s),
            other => serde_json::from_value::<NormFile>(other).map_err(|e| MetricsError::Parse(e.to_string()))?.try_into(),
        }
    }
}

impl TryFrom<NormFile> for NormSpec {
    type Error = MetricsError;

    fn try_from(f: NormFile) -> Result<Self, Self::Error> {
        let missing = |what: &str| MetricsError::Parse(format!("variant {} needs {what}", f.variant));
        let spec = match f.variant.as_str() {
            "p" => {
                let p = match f.p.as_ref().ok_or_else(|| missing("p"))? {
                    serde_json::Value::Number(n) => n.as_f64().ok_or_else(|| missing("numeric p"))?,
                    serde_json::Value::String(s) if s == "inf" => f64::INFINITY,
                    other => return Err(MetricsError::Parse(format!("bad p {other}"))),
                };
                NormSpec::p(f.dim, p)?
            }
            "polyhedral" => match (f.vertices.clone(), f.facets.clone()) {
                (Some(v), Some(a)) => NormSpec::polyhedral(f.dim, v, a)?,
                (Some(v), None) => NormSpec::from_points(&v)?,
                (None, Some(a)) => NormSpec::from_functionals(&a)?,
                (None, None) => return Err(missing("vertices or facets")),
            },
            "pushforward" => {
                let map = f.map.clone().ok_or_else(|| missing("map"))?;
                let codomain = *f.codomain.clone().ok_or_else(|| missing("codomain"))?;
                NormSpec::pushforward(map, codomain)?
            }
            "max_sum" => NormSpec::max_sum(f.parts.clone().ok_or_else(|| missing("parts"))?)?,
            other => return Err(MetricsError::Parse(format!("unknown variant {other:?}"))),
        };
        check_dim(f.dim, spec.dim())?;
        Ok(spec)
    }
}

impl From<NormSpec> for NormFile {
    fn from(s: NormSpec) -> Self {
        let dim = s.dim();
        let mut f = NormFile {
            dim,
            variant: String::new(),
            p: None,
            vertices: None,
            facets: None,
            map: None,
            codomain: None,
            parts: None,
        };
        match s {
            NormSpec::P { p, .. } => {
                f.variant = "p".into();
                f.p = Some(if p.is_infinite() { serde_json::Value::from("inf") } else { serde_json::Value::from(p) });
            }
            NormSpec::Polyhedral { vertices, facets, .. } => {
                f.variant = "polyhedral".into();
                f.vertices = Some(vertices);
                f.facets = Some(facets);
            }
            NormSpec::Pushforward { map, codomain } => {
                f.variant = "pushforward".into();
                f.map = Some(map);
                f.codomain = Some(codomain);
            }
            NormSpec::MaxSum(parts) => {
                f.variant = "max_sum".into();
                f.parts = Some(parts);
            }
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn unit_vectors_have_norm_one() {
        for p in [1.0, 2.0, 3.0, f64::INFINITY] {
            let n = NormSpec::p(3, p).unwrap();
            assert_eq!(n.eval(&[1.0, 0.0, 0.0]).unwrap(), 1.0);
        }
    }

    #[test]
    fn closed_forms() {
        let l3 = NormSpec::p(2, 3.0).unwrap();
        assert!(close(l3.eval(&[1.0, 1.0]).unwrap(), 2f64.powf(1.0 / 3.0), 1e-15));
        let poly = NormSpec::l1(2).to_polyhedral().unwrap();
        assert_eq!(poly.eval(&[3.0, 4.0]).unwrap(), 7.0);
        assert_eq!(NormSpec::l1(2).eval(&[3.0, 4.0]).unwrap(), 7.0);
        assert_eq!(NormSpec::l2(2).eval(&[0.0, 0.0]).unwrap(), 0.0);
        assert!(NormSpec::l2(2).eval(&[1.0]).is_err());
    }

    #[test]
    fn duals_agree_across_variants() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pushed = NormSpec::pushforward(vec![vec![1.0, 2.0], vec![0.0, 1.0], vec![-1.0, 1.0]], NormSpec::linf(3)).unwrap();
        let pushed2 = NormSpec::pushforward(vec![vec![1.0, 2.0], vec![0.0, 1.0], vec![-1.0, 1.0]], NormSpec::l2(3)).unwrap();
        for _ in 0..50 {
            let f: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
            for spec in [NormSpec::l1(2), NormSpec::linf(2), NormSpec::p(2, 3.0).unwrap(), pushed.clone(), pushed2.clone()] {
                let via_spec = spec.dual().unwrap().eval(&f).unwrap();
                assert!(close(spec.dual_eval(&f).unwrap(), via_spec, 1e-9), "{spec}");
                // support point attains the dual norm
                let x = spec.support(&f).unwrap();
                assert!(spec.eval(&x).unwrap() <= 1.0 + 1e-9);
                assert!(close(dot(&x, &f), via_spec, 1e-9), "{spec}");
            }
        }
    }

    #[test]
    fn norm_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let poly = NormSpec::from_points(&[vec![1.0, 0.3], vec![0.2, 0.9], vec![-0.6, 0.7]]).unwrap();
        let pushed = NormSpec::pushforward(vec![vec![1.0, 0.5], vec![0.0, 2.0], vec![1.0, -1.0]], NormSpec::p(3, 1.5).unwrap()).unwrap();
        let sum = NormSpec::max_sum(vec![NormSpec::l2(1), NormSpec::l1(1)]).unwrap();
        for spec in [poly, pushed, sum, NormSpec::p(2, 4.0).unwrap()] {
            for _ in 0..100 {
                let x: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let y: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let t: f64 = rng.gen_range(-4.0..4.0);
                let nx = spec.eval(&x).unwrap();
                let tx: Vec<f64> = x.iter().map(|v| t * v).collect();
                assert!(close(spec.eval(&tx).unwrap(), t.abs() * nx, 1e-9 * (1.0 + nx)));
                let s: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
                assert!(spec.eval(&s).unwrap() <= nx + spec.eval(&y).unwrap() + 1e-9);
            }
        }
    }

    #[test]
    fn polyhedral_consistency_is_checked() {
        let sq = NormSpec::linf(2).to_polyhedral().unwrap();
        let NormSpec::Polyhedral { vertices, facets, .. } = sq else { unreachable!() };
        assert!(NormSpec::polyhedral(2, vertices.clone(), facets.clone()).is_ok());
        let mut scaled = facets.clone();
        scaled[0][0] *= 2.0;
        assert!(NormSpec::polyhedral(2, vertices.clone(), scaled).is_err());
        assert!(NormSpec::polyhedral(2, vertices[..3].to_vec(), facets).is_err());
    }

    #[test]
    fn json_and_shorthand() {
        let specs = [
            NormSpec::linf(2),
            NormSpec::p(3, 1.5).unwrap(),
            NormSpec::from_points(&[vec![1.0, 0.0], vec![0.5, 1.0]]).unwrap(),
            NormSpec::pushforward(vec![vec![1.0], vec![2.0]], NormSpec::l1(2)).unwrap(),
        ];
        for s in specs {
            assert_eq!(NormSpec::parse_json(&s.to_json()).unwrap(), s);
        }
        assert_eq!("linf:2".parse::<NormSpec>().unwrap(), NormSpec::linf(2));
        assert_eq!("l1:3".parse::<NormSpec>().unwrap(), NormSpec::l1(3));
        assert!("l0.5:2".parse::<NormSpec>().is_err());
        assert!("x2:2".parse::<NormSpec>().is_err());
        let short = NormSpec::parse_json(r#"{"dim": 2, "variant": "polyhedral", "facets": [[1, 0], [0, 1]]}"#).unwrap();
        assert_eq!(short.eval(&[-3.0, 2.0]).unwrap(), 3.0);
        assert!(NormSpec::parse_json(r#"{"dim": 2, "variant": "pushforward", "map": [[1, 1], [2, 2]], "codomain": {"dim": 2, "variant": "p", "p": 2}}"#).is_err());
        assert_eq!(NormSpec::parse_json(r#""l2:3""#).unwrap(), NormSpec::l2(3));
        let mixed = NormSpec::parse_json(r#"{"dim": 1, "variant": "pushforward", "map": [[1], [2]], "codomain": "l1:2"}"#).unwrap();
        assert_eq!(mixed.eval(&[1.0]).unwrap(), 3.0);
    }
}
