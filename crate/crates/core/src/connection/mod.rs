//! Connection systems `∂Y = A_∂ Y`, one matrix per derivation.
//!
//! The integrability defect of a pair is
//! `Defect(u, v) = ∂_u A_v − ∂_v A_u − [A_u, A_v]`; a system is flat when all
//! defects vanish. Pairs are reported in the orientation (later, earlier)
//! with respect to the derivation order of the tower.

mod flatten;

use thiserror::Error;

pub use flatten::{flatten, FlattenBounds, FlattenOutcome, ObstructionWitness};

use crate::difftower::{Derivation, Tower, TowerElement, TowerError};
use crate::exactalg::{linear_solve, nullspace, Field, Matrix, SolutionSet};

pub type Mat = Matrix<TowerElement>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConnectionError {
    #[error("unknown derivation `{0}`")]
    UnknownDerivation(String),
    #[error("matrix for `{name}` is {rows}x{cols}, expected {size}x{size}")]
    Shape {
        name: String,
        rows: usize,
        cols: usize,
        size: usize,
    },
    #[error("derivation `{0}` given twice")]
    Duplicate(String),
    #[error("gauge matrix is singular")]
    SingularGauge,
    #[error("pairwise mode needs a principal derivation")]
    NoPrincipal,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported field: {0}")]
    UnsupportedField(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Square matrices of one size over a tower, keyed by derivation name.
#[derive(Clone, Debug)]
pub struct ConnectionSystem {
    tower: Tower,
    size: usize,
    principal: Option<String>,
    /// Sorted by the tower's derivation order.
    matrices: Vec<(Derivation, Mat)>,
}

impl PartialEq for ConnectionSystem {
    fn eq(&self, other: &Self) -> bool {
        self.tower.same_as(&other.tower)
            && self.size == other.size
            && self.principal == other.principal
            && self.matrices == other.matrices
    }
}

impl ConnectionSystem {
    /// The principal derivation, if given, must be among the matrices.
    pub fn new(
        tower: &Tower,
        size: usize,
        principal: Option<&str>,
        matrices: Vec<(String, Mat)>,
    ) -> Result<Self, ConnectionError> {
        let mut out: Vec<(usize, Derivation, Mat)> = Vec::new();
        for (name, m) in matrices {
            if m.rows() != size || m.cols() != size {
                return Err(ConnectionError::Shape {
                    name,
                    rows: m.rows(),
                    cols: m.cols(),
                    size,
                });
            }
            let d = tower
                .derivation(&name)
                .map_err(|_| ConnectionError::UnknownDerivation(name.clone()))?;
            let idx = tower.derivation_index(&name).expect("known derivation");
            if out.iter().any(|(_, e, _)| e.name == name) {
                return Err(ConnectionError::Duplicate(name));
            }
            out.push((idx, d, m));
        }
        out.sort_by_key(|(i, _, _)| *i);
        if let Some(p) = principal {
            if !out.iter().any(|(_, d, _)| d.name == p) {
                return Err(ConnectionError::UnknownDerivation(p.to_string()));
            }
        }
        Ok(ConnectionSystem {
            tower: tower.clone(),
            size,
            principal: principal.map(str::to_string),
            matrices: out.into_iter().map(|(_, d, m)| (d, m)).collect(),
        })
    }

    /// The all-zero system on the given derivations.
    pub fn zero(tower: &Tower, size: usize, principal: Option<&str>, names: &[&str]) -> Result<Self, ConnectionError> {
        Self::new(
            tower,
            size,
            principal,
            names.iter().map(|n| (n.to_string(), Mat::zeros(size, size))).collect(),
        )
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn principal(&self) -> Option<&str> {
        self.principal.as_deref()
    }

    pub fn names(&self) -> Vec<String> {
        self.matrices.iter().map(|(d, _)| d.name.clone()).collect()
    }

    pub fn matrices(&self) -> impl Iterator<Item = (&str, &Mat)> {
        self.matrices.iter().map(|(d, m)| (d.name.as_str(), m))
    }

    pub fn matrix(&self, name: &str) -> Result<&Mat, ConnectionError> {
        self.entry(name).map(|(_, m)| m)
    }

    fn entry(&self, name: &str) -> Result<(&Derivation, &Mat), ConnectionError> {
        self.matrices
            .iter()
            .find(|(d, _)| d.name == name)
            .map(|(d, m)| (d, m))
            .ok_or_else(|| ConnectionError::UnknownDerivation(name.to_string()))
    }

    fn position(&self, name: &str) -> Result<usize, ConnectionError> {
        self.matrices
            .iter()
            .position(|(d, _)| d.name == name)
            .ok_or_else(|| ConnectionError::UnknownDerivation(name.to_string()))
    }

    /// Same derivations with the matrices replaced.
    pub fn with_matrices(&self, f: impl Fn(&str, &Mat) -> Mat) -> Self {
        let mut out = self.clone();
        for (d, m) in out.matrices.iter_mut() {
            *m = f(&d.name, m);
        }
        out
    }

    /// `A ↦ −Aᵀ`, the convention change between `∂ē = −ē·A` and `∂Y = AY`.
    /// It is an involution.
    pub fn dual(&self) -> Self {
        self.with_matrices(|_, m| m.transpose().neg())
    }

    /// Entrywise derivative.
    pub fn derive_matrix(&self, m: &Mat, d: &Derivation) -> Mat {
        m.map(|e| self.tower.derive(e, d))
    }

    pub fn derive_matrix_by(&self, m: &Mat, name: &str) -> Result<Mat, ConnectionError> {
        let d = self.tower.derivation(name)?;
        Ok(self.derive_matrix(m, &d))
    }

    /// `∂_u A_v − ∂_v A_u − [A_u, A_v]`.
    pub fn defect(&self, u: &str, v: &str) -> Result<Mat, ConnectionError> {
        let (du, au) = self.entry(u)?;
        let (dv, av) = self.entry(v)?;
        Ok(self
            .derive_matrix(av, du)
            .sub(&self.derive_matrix(au, dv))
            .sub(&au.commutator(av)))
    }

    /// All pairs in (later, earlier) orientation.
    pub fn pairs(&self) -> Vec<(String, String)> {
        let names = self.names();
        let mut out = Vec::new();
        for j in 0..names.len() {
            for i in (j + 1)..names.len() {
                out.push((names[i].clone(), names[j].clone()));
            }
        }
        out
    }

    /// Orients a pair as (later, earlier); returns whether it was swapped.
    pub fn orient(&self, u: &str, v: &str) -> Result<((String, String), bool), ConnectionError> {
        let (i, j) = (self.position(u)?, self.position(v)?);
        if i >= j {
            Ok(((u.to_string(), v.to_string()), false))
        } else {
            Ok(((v.to_string(), u.to_string()), true))
        }
    }

    pub fn curvature(&self) -> Result<CurvatureForm, ConnectionError> {
        let mut entries = Vec::new();
        for (u, v) in self.pairs() {
            let h = self.defect(&u, &v)?;
            entries.push(((u, v), h));
        }
        Ok(CurvatureForm { entries })
    }

    pub fn is_flat(&self) -> Result<bool, ConnectionError> {
        for (u, v) in self.pairs() {
            if !self.defect(&u, &v)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn check_integrability(&self, mode: CheckMode) -> Result<IntegrabilityReport, ConnectionError> {
        let pairs = match mode {
            CheckMode::Full => self.pairs(),
            CheckMode::Pairwise => {
                let p = self.principal.clone().ok_or(ConnectionError::NoPrincipal)?;
                self.names()
                    .into_iter()
                    .filter(|n| *n != p)
                    .map(|n| self.orient(&n, &p).map(|(pair, _)| pair))
                    .collect::<Result<_, _>>()?
            }
        };
        let mut verdicts = Vec::new();
        for (u, v) in pairs {
            let h = self.defect(&u, &v)?;
            verdicts.push(PairVerdict {
                first: u,
                second: v,
                flat: h.is_zero(),
                defect: h,
            });
        }
        Ok(IntegrabilityReport { mode, pairs: verdicts })
    }

    /// `A ↦ g A g⁻¹ + (∂g) g⁻¹` for every derivation.
    pub fn gauge(&self, g: &Mat) -> Result<Self, ConnectionError> {
        if g.rows() != self.size || g.cols() != self.size {
            return Err(ConnectionError::Shape {
                name: "gauge".into(),
                rows: g.rows(),
                cols: g.cols(),
                size: self.size,
            });
        }
        let gi = g.inverse().ok_or(ConnectionError::SingularGauge)?;
        let mut out = self.clone();
        for (d, m) in out.matrices.iter_mut() {
            let dg = g.map(|e| self.tower.derive(e, d));
            *m = g.mul(m).mul(&gi).add(&dg.mul(&gi));
        }
        Ok(out)
    }

    /// `Σ_cyc (∂_u h_{vw} − [A_u, h_{vw}])`; zero for every system over
    /// commuting derivations.
    pub fn bianchi_sum(&self, u: &str, v: &str, w: &str) -> Result<Mat, ConnectionError> {
        let mut acc = Mat::zeros(self.size, self.size);
        for (a, b, c) in [(u, v, w), (v, w, u), (w, u, v)] {
            let h = self.defect(b, c)?;
            let (da, aa) = self.entry(a)?;
            acc = acc.add(&self.derive_matrix(&h, da)).sub(&aa.commutator(&h));
        }
        Ok(acc)
    }

    /// `A_∂ ↦ A_∂ + a_∂`.
    pub fn equivalence_move(&self, a: &EquivalenceMove) -> Result<Self, ConnectionError> {
        let mut out = self.clone();
        for (name, m) in &a.matrices {
            let i = self.position(name)?;
            if m.rows() != self.size || m.cols() != self.size {
                return Err(ConnectionError::Shape {
                    name: name.clone(),
                    rows: m.rows(),
                    cols: m.cols(),
                    size: self.size,
                });
            }
            out.matrices[i].1 = out.matrices[i].1.add(m);
        }
        Ok(out)
    }

    /// `h + (∂_u a_v − ∂_v a_u − [A_u, a_v] − [a_u, A_v]) − [a_u, a_v]`, the
    /// defect of the moved system computed from the old one.
    pub fn moved_defect(&self, a: &EquivalenceMove, u: &str, v: &str) -> Result<Mat, ConnectionError> {
        let h = self.defect(u, v)?;
        let (du, au) = self.entry(u)?;
        let (dv, av) = self.entry(v)?;
        let zero = Mat::zeros(self.size, self.size);
        let mu = a.get(u).unwrap_or(&zero);
        let mv = a.get(v).unwrap_or(&zero);
        let d_a = self
            .derive_matrix(mv, du)
            .sub(&self.derive_matrix(mu, dv))
            .sub(&au.commutator(mv))
            .sub(&mu.commutator(av));
        Ok(h.add(&d_a).sub(&mu.commutator(mv)))
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Each non-principal derivation against the principal one.
    Pairwise,
    /// Every pair.
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairVerdict {
    pub first: String,
    pub second: String,
    pub flat: bool,
    pub defect: Mat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrabilityReport {
    pub mode: CheckMode,
    pub pairs: Vec<PairVerdict>,
}

impl IntegrabilityReport {
    pub fn holds(&self) -> bool {
        self.pairs.iter().all(|p| p.flat)
    }

    pub fn failing(&self) -> impl Iterator<Item = &PairVerdict> {
        self.pairs.iter().filter(|p| !p.flat)
    }
}

/// Defects of all pairs in (later, earlier) orientation; `h_{vu} = −h_{uv}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureForm {
    entries: Vec<((String, String), Mat)>,
}

impl CurvatureForm {
    pub fn get(&self, u: &str, v: &str) -> Option<Mat> {
        for ((a, b), m) in &self.entries {
            if a == u && b == v {
                return Some(m.clone());
            }
            if a == v && b == u {
                return Some(m.neg());
            }
        }
        None
    }

    pub fn entries(&self) -> &[((String, String), Mat)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, m)| m.is_zero())
    }
}

/// A matrix-valued one-form `a`, one matrix per derivation (absent = zero).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct EquivalenceMove {
    matrices: Vec<(String, Mat)>,
}

impl EquivalenceMove {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, m: Mat) -> Self {
        self.set(name, m);
        self
    }

    pub fn set(&mut self, name: &str, m: Mat) {
        if let Some(slot) = self.matrices.iter_mut().find(|(n, _)| n == name) {
            slot.1 = m;
        } else {
            self.matrices.push((name.to_string(), m));
        }
    }

    pub fn get(&self, name: &str) -> Option<&Mat> {
        self.matrices.iter().find(|(n, _)| n == name).map(|(_, m)| m)
    }

    pub fn entries(&self) -> &[(String, Mat)] {
        &self.matrices
    }

    pub fn is_zero(&self) -> bool {
        self.matrices.iter().all(|(_, m)| m.is_zero())
    }
}

/// Basis of `{X : XM = MX for all M}` over the coefficient field.
pub fn centralizer<F: Field>(mats: &[Matrix<F>]) -> Vec<Matrix<F>> {
    let n = mats.first().map_or(0, |m| m.rows());
    let idx = |i: usize, j: usize| i * n + j;
    let mut rows: Vec<Vec<F>> = Vec::new();
    for m in mats {
        // (XM − MX)_{ij} = Σ_k X_ik M_kj − M_ik X_kj
        for i in 0..n {
            for j in 0..n {
                let mut row = vec![F::zero(); n * n];
                for k in 0..n {
                    let a = m.get(k, j);
                    if !a.is_zero() {
                        row[idx(i, k)] = row[idx(i, k)].add(a);
                    }
                    let b = m.get(i, k);
                    if !b.is_zero() {
                        row[idx(k, j)] = row[idx(k, j)].sub(b);
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    if rows.is_empty() {
        return (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| Matrix::unit(n, i, j))
            .collect();
    }
    let sys = Matrix::from_rows(rows);
    nullspace(&sys)
        .into_iter()
        .map(|v| Matrix::from_fn(n, n, |i, j| v[idx(i, j)].clone()))
        .collect()
}

/// Whether two lists of matrices span the same space.
pub fn same_span<F: Field>(a: &[Matrix<F>], b: &[Matrix<F>]) -> bool {
    let flat = |ms: &[Matrix<F>]| -> Vec<Vec<F>> { ms.iter().map(|m| m.entries().cloned().collect()).collect() };
    let (fa, fb) = (flat(a), flat(b));
    let contained = |xs: &[Vec<F>], ys: &[Vec<F>]| -> bool {
        if ys.is_empty() {
            return true;
        }
        if xs.is_empty() {
            return ys.iter().all(|y| y.iter().all(|e| e.is_zero()));
        }
        let dim = xs[0].len();
        let m = Matrix::from_fn(dim, xs.len(), |i, j| xs[j][i].clone());
        ys.iter().all(|y| !linear_solve(&m, y).is_inconsistent())
    };
    contained(&fa, &fb) && contained(&fb, &fa)
}

/// Coordinates of `m` in the span of `basis`, if it lies there.
pub fn span_coordinates<F: Field>(basis: &[Matrix<F>], m: &Matrix<F>) -> Option<Vec<F>> {
    let dim = m.rows() * m.cols();
    let a = Matrix::from_fn(dim, basis.len(), |i, j| basis[j].entries().nth(i).unwrap().clone());
    let rhs: Vec<F> = m.entries().cloned().collect();
    match linear_solve(&a, &rhs) {
        SolutionSet::Inconsistent => None,
        SolutionSet::Solutions { particular, .. } => Some(particular),
    }
}
