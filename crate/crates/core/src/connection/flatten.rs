//! Curvature flattening by equivalence moves, one derivation at a time.
//!
//! Two strategies:
//! - a decision procedure when the move is constrained to the span of
//!   constant commuting matrices that commute with the system and only two
//!   derivations are processed: each coordinate of the defect must be an
//!   exact 2-form, which `derham::exact2form_solvable` decides;
//! - otherwise a bounded-degree ansatz for each move, solved over ℚ.

use std::collections::{BTreeMap, BTreeSet};

use super::{span_coordinates, ConnectionError, ConnectionSystem, EquivalenceMove, Mat};
use crate::derham::{exact2form_solvable, DerhamError, Exact2Form, ResidueWitness};
use crate::difftower::{Derivation, TowerElement};
use crate::exactalg::{lcm, linear_solve, q_int, Matrix, Monomial, MultiPoly, SolutionSet, Var, Q};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct FlattenBounds {
    /// Total degree of ansatz numerators.
    pub degree: u32,
}

impl Default for FlattenBounds {
    fn default() -> Self {
        FlattenBounds { degree: 4 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ObstructionWitness {
    /// The defect of the pair leaves the constraint span, while every move
    /// in the span changes it only within the span.
    OutsideSpan { pair: (String, String), defect: Mat },
    /// The coordinate of the defect along `basis[index]` is not an exact
    /// 2-form.
    Residue {
        pair: (String, String),
        index: usize,
        coordinate: TowerElement,
        witness: ResidueWitness,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum FlattenOutcome {
    Found { moves: EquivalenceMove, system: ConnectionSystem },
    ProvenObstruction(ObstructionWitness),
    /// Inconclusive: no move with numerators of this degree.
    NotFoundWithinBounds { degree: u32, derivation: String },
}

/// Finds moves supported on `order` that make `s` fully integrable.
pub fn flatten(
    s: &ConnectionSystem,
    order: &[&str],
    constraint: Option<&[Mat]>,
    bounds: FlattenBounds,
) -> Result<FlattenOutcome, ConnectionError> {
    for name in order {
        s.matrix(name)?;
    }
    if s.principal().is_some() {
        let report = s.check_integrability(super::CheckMode::Pairwise)?;
        let bad = report.failing().next().cloned();
        if let Some(bad) = bad {
            return Err(ConnectionError::Precondition(format!(
                "pair ({}, {}) is not integrable",
                bad.first, bad.second
            )));
        }
    }
    let fixed: Vec<String> = s.names().into_iter().filter(|n| !order.contains(&n.as_str())).collect();
    for (i, u) in fixed.iter().enumerate() {
        for v in &fixed[..i] {
            if !s.defect(u, v)?.is_zero() {
                return Err(ConnectionError::Precondition(format!(
                    "pair ({u}, {v}) lies outside the processed derivations and is not integrable"
                )));
            }
        }
    }
    if s.is_flat()? {
        return Ok(FlattenOutcome::Found {
            moves: EquivalenceMove::new(),
            system: s.clone(),
        });
    }
    if let Some(basis) = constraint {
        if let Some(out) = bivariate(s, order, basis)? {
            return Ok(out);
        }
    }
    induction(s, order, constraint, bounds)
}

fn is_constant_matrix(m: &Mat) -> bool {
    m.entries().all(|e| e.is_constant())
}

/// The decision procedure, or `None` when its hypotheses fail.
fn bivariate(s: &ConnectionSystem, order: &[&str], basis: &[Mat]) -> Result<Option<FlattenOutcome>, ConnectionError> {
    let tower = s.tower();
    if order.len() != 2 || tower.has_generators() || basis.is_empty() {
        return Ok(None);
    }
    if !basis.iter().all(is_constant_matrix) {
        return Ok(None);
    }
    for (i, c) in basis.iter().enumerate() {
        if basis[..i].iter().any(|d| !c.commutator(d).is_zero()) {
            return Ok(None);
        }
        if s.matrices().any(|(_, a)| !c.commutator(a).is_zero()) {
            return Ok(None);
        }
    }
    let d1 = tower.derivation(order[0])?;
    let d2 = tower.derivation(order[1])?;
    let (Some(i1), Some(i2)) = (d1.as_base(), d2.as_base()) else {
        return Ok(None);
    };
    let (t1, t2) = (tower.base_var(i1), tower.base_var(i2));
    let pair = (order[1].to_string(), order[0].to_string());
    let h = s.defect(order[1], order[0])?;
    let Some(coords) = span_coordinates(basis, &h) else {
        return Ok(Some(FlattenOutcome::ProvenObstruction(ObstructionWitness::OutsideSpan {
            pair,
            defect: h,
        })));
    };
    // The moves must not disturb the other derivations: they act on base
    // variables absent from the coordinates.
    let others: Vec<Derivation> = s
        .names()
        .iter()
        .filter(|n| !order.contains(&n.as_str()))
        .map(|n| tower.derivation(n))
        .collect::<Result<_, _>>()?;
    for d in &others {
        let Some(i) = d.as_base() else { return Ok(None) };
        let v = tower.base_var(i);
        if coords.iter().any(|g| g.contains_var(v)) {
            return Ok(None);
        }
    }
    if coords.iter().any(|g| g.vars().iter().any(|v| *v != t1 && *v != t2)) {
        return Ok(None);
    }
    let n = s.size();
    let mut a1 = Mat::zeros(n, n);
    let mut a2 = Mat::zeros(n, n);
    for (index, g) in coords.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        match exact2form_solvable(g, t1, t2) {
            Ok(Exact2Form::Unsolvable(witness)) => {
                return Ok(Some(FlattenOutcome::ProvenObstruction(ObstructionWitness::Residue {
                    pair,
                    index,
                    coordinate: g.clone(),
                    witness,
                })));
            }
            Ok(Exact2Form::Solvable { f1, f2 }) => {
                a1 = a1.sub(&basis[index].scale(&f1));
                a2 = a2.sub(&basis[index].scale(&f2));
            }
            Err(DerhamError::Unsupported(m)) => return Err(ConnectionError::UnsupportedField(m)),
            Err(e) => return Err(ConnectionError::UnsupportedField(e.to_string())),
        }
    }
    let moves = EquivalenceMove::new().with(order[0], a1).with(order[1], a2);
    let system = s.equivalence_move(&moves)?;
    if !system.is_flat()? {
        return Err(ConnectionError::Precondition("flattened system failed verification".into()));
    }
    Ok(Some(FlattenOutcome::Found { moves, system }))
}

fn monomials(vars: &[Var], degree: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    for &v in vars {
        let mut next = Vec::new();
        for m in &out {
            for e in 0..=(degree - m.degree()) {
                next.push(m.mul(&Monomial::var(v, e)));
            }
        }
        out = next;
    }
    out.sort();
    out
}

fn induction(
    s: &ConnectionSystem,
    order: &[&str],
    constraint: Option<&[Mat]>,
    bounds: FlattenBounds,
) -> Result<FlattenOutcome, ConnectionError> {
    let tower = s.tower().clone();
    let fixed: Vec<String> = s.names().into_iter().filter(|x| !order.contains(&x.as_str())).collect();
    let mut cur = s.clone();
    let mut moves = EquivalenceMove::new();
    for (i, name) in order.iter().enumerate() {
        let partners: Vec<String> = order[..i]
            .iter()
            .map(|x| x.to_string())
            .chain(fixed.iter().cloned())
            .collect();
        // ∂_e a + [a, A_e] = Defect(name, e) for each partner e
        let mut eqs: Vec<(Derivation, Mat, Mat)> = Vec::new();
        for e in &partners {
            let rhs = cur.defect(name, e)?;
            eqs.push((tower.derivation(e)?, cur.matrix(e)?.clone(), rhs));
        }
        if eqs.iter().all(|(_, _, r)| r.is_zero()) {
            continue;
        }
        let Some(a) = solve_move(&cur, &eqs, order, constraint, bounds.degree)? else {
            return Ok(FlattenOutcome::NotFoundWithinBounds {
                degree: bounds.degree,
                derivation: name.to_string(),
            });
        };
        let step = EquivalenceMove::new().with(name, a.clone());
        cur = cur.equivalence_move(&step)?;
        moves.set(name, a);
    }
    if !cur.is_flat()? {
        return Ok(FlattenOutcome::NotFoundWithinBounds {
            degree: bounds.degree,
            derivation: order.last().map_or(String::new(), |x| x.to_string()),
        });
    }
    Ok(FlattenOutcome::Found { moves, system: cur })
}

/// Solves the move equations with numerators of bounded degree over the
/// lcm of the denominators present.
fn solve_move(
    s: &ConnectionSystem,
    eqs: &[(Derivation, Mat, Mat)],
    current: &[&str],
    constraint: Option<&[Mat]>,
    degree: u32,
) -> Result<Option<Mat>, ConnectionError> {
    let tower = s.tower();
    let n = s.size();
    let mut den = MultiPoly::one();
    let mut vars: BTreeSet<Var> = BTreeSet::new();
    let bases: BTreeSet<Var> = (0..tower.base_names().len()).map(|i| tower.base_var(i)).collect();
    for (_, a, r) in eqs {
        for e in a.entries().chain(r.entries()) {
            den = lcm(&den, e.den());
            vars.extend(e.vars().into_iter().filter(|v| bases.contains(v)));
        }
    }
    for (d, _, _) in eqs {
        vars.extend(d.terms().iter().map(|(i, _)| tower.base_var(*i)));
    }
    for name in current {
        vars.extend(tower.derivation(name)?.terms().iter().map(|(i, _)| tower.base_var(*i)));
    }
    for (_, m) in s.matrices() {
        for e in m.entries() {
            vars.extend(e.vars().into_iter().filter(|v| bases.contains(v)));
        }
    }
    let vars: Vec<Var> = vars.into_iter().collect();
    let l = TowerElement::from_poly(den);
    let directions: Vec<Mat> = match constraint {
        Some(b) => b.to_vec(),
        None => (0..n).flat_map(|i| (0..n).map(move |j| Mat::unit(n, i, j))).collect(),
    };
    let mons = monomials(&vars, degree);
    let mut unknowns: Vec<Mat> = Vec::new();
    for d in &directions {
        for m in &mons {
            let f = &TowerElement::from_poly(MultiPoly::term(m.clone(), q_int(1))) / &l;
            unknowns.push(d.scale(&f));
        }
    }
    // images[k][eq] = ∂_e B_k + [B_k, A_e]
    let images: Vec<Vec<Mat>> = unknowns
        .iter()
        .map(|b| {
            eqs.iter()
                .map(|(d, a, _)| s.derive_matrix(b, d).add(&b.commutator(a)))
                .collect()
        })
        .collect();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    let mut rhs: Vec<Q> = Vec::new();
    for (q, (_, _, r)) in eqs.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                let mut common = r.get(i, j).den().clone();
                for img in &images {
                    common = lcm(&common, img[q].get(i, j).den());
                }
                let mut table: BTreeMap<Monomial, (Vec<Q>, Q)> = BTreeMap::new();
                let zero_row = || (vec![q_int(0); unknowns.len()], q_int(0));
                for (k, img) in images.iter().enumerate() {
                    let p = img[q].get(i, j).mul_poly(&common);
                    for (m, c) in p.num().terms() {
                        table.entry(m.clone()).or_insert_with(zero_row).0[k] += c;
                    }
                }
                let p = r.get(i, j).mul_poly(&common);
                for (m, c) in p.num().terms() {
                    table.entry(m.clone()).or_insert_with(zero_row).1 += c;
                }
                for (_, (row, b)) in table {
                    rows.push(row);
                    rhs.push(b);
                }
            }
        }
    }
    if rows.is_empty() {
        return Ok(Some(Mat::zeros(n, n)));
    }
    let system = Matrix::from_rows(rows);
    match linear_solve(&system, &rhs) {
        SolutionSet::Inconsistent => Ok(None),
        SolutionSet::Solutions { particular, .. } => {
            let mut a = Mat::zeros(n, n);
            for (c, b) in particular.iter().zip(&unknowns) {
                if *c != q_int(0) {
                    a = a.add(&b.scale(&TowerElement::constant(c.clone())));
                }
            }
            Ok(Some(a))
        }
    }
}
