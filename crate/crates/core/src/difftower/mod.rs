//! Differential field towers.
//!
//! A tower starts from ℚ(base variables) with one partial derivation per base
//! variable, and adjoins generators. A generator's derivative along a base
//! direction is either given by a rule (an element of the tower) or is a
//! fresh jet symbol. Jets are indexed by multi-indices over the directions
//! without rules, so derivatives along those directions commute by
//! construction. Rules are checked for commutativity when the tower is built.
//!
//! Elements are [`RationalFunction`]s in the registry of the tower, which
//! grows as jets are created. A [`Tower`] handle is cheap to clone and all
//! clones share the registry.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::exactalg::{AlgError, RationalFunction, Var, VarKind, VariableRegistry};

pub type TowerElement = RationalFunction;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TowerError {
    #[error("generator `{generator}` has no rule for derivation `{derivation}`")]
    MissingRule { generator: String, derivation: String },
    #[error("generator `{generator}` is free but has a rule for `{derivation}`")]
    RuleForFree { generator: String, derivation: String },
    #[error("`{0}` is not free in the requested directions")]
    NotFree(String),
    #[error("unknown derivation `{0}`")]
    UnknownDerivation(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("derivation `{0}` already defined differently")]
    DerivationExists(String),
    #[error("derivations do not commute on {} generator(s)", .0.len())]
    Inconsistent(Vec<CommutativityWitness>),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum DerivKind {
    Principal,
    Parametric,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    /// No rules: every derivative is a jet.
    Free,
    /// A rule for every base derivation.
    Defined,
    /// Rules for some directions, jets for the rest.
    Mixed,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Default)]
pub enum ConsistencyPolicy {
    #[default]
    Refuse,
    Warn,
}

/// `∂_d ∂_e s ≠ ∂_e ∂_d s` for the symbol `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutativityWitness {
    pub symbol: String,
    pub first: String,
    pub second: String,
    /// `∂_second ∂_first s`
    pub first_then_second: TowerElement,
    /// `∂_first ∂_second s`
    pub second_then_first: TowerElement,
}

/// A derivation `Σ λ_j ∂_j` over the base directions.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivation {
    pub name: String,
    pub kind: DerivKind,
    terms: Vec<(usize, TowerElement)>,
}

impl Derivation {
    /// The base direction, if this is a plain partial derivative.
    pub fn as_base(&self) -> Option<usize> {
        match self.terms.as_slice() {
            [(i, c)] if c.is_one() => Some(*i),
            _ => None,
        }
    }

    pub fn terms(&self) -> &[(usize, TowerElement)] {
        &self.terms
    }
}

#[derive(Clone, Debug)]
enum Symbol {
    Base(usize),
    Jet { generator: usize, alpha: Vec<u32> },
}

#[derive(Clone, Debug)]
struct Generator {
    name: String,
    kind: GeneratorKind,
    rules: Vec<Option<TowerElement>>,
}

#[derive(Clone, Debug)]
struct BaseDerivation {
    name: String,
    var: Var,
    kind: DerivKind,
}

#[derive(Debug, Default)]
struct State {
    registry: VariableRegistry,
    bases: Vec<BaseDerivation>,
    composites: Vec<Derivation>,
    generators: Vec<Generator>,
    symbols: HashMap<Var, Symbol>,
    jets: HashMap<(usize, Vec<u32>), Var>,
    cache: HashMap<(Var, usize), TowerElement>,
}

impl State {
    fn jet_var(&mut self, g: usize, alpha: Vec<u32>) -> Var {
        if let Some(v) = self.jets.get(&(g, alpha.clone())) {
            return *v;
        }
        let mut name = self.generators[g].name.clone();
        for (k, &a) in alpha.iter().enumerate() {
            for _ in 0..a {
                name.push('_');
                name.push_str(&self.bases[k].name);
            }
        }
        // Jet names can collide with user names only if the user picked them.
        while self.registry.lookup(&name).is_some() {
            name.push('\'');
        }
        let v = self.registry.register(&name, VarKind::Jet).expect("fresh name");
        self.jets.insert((g, alpha.clone()), v);
        self.symbols.insert(v, Symbol::Jet { generator: g, alpha });
        v
    }

    /// Validates a jet request: generator index and multi-index over directions without rules.
    fn jet_request(&self, generator: &str, multi_index: &[(&str, u32)]) -> Result<(usize, Vec<u32>), TowerError> {
        let g = self
            .generators
            .iter()
            .position(|x| x.name == generator)
            .ok_or_else(|| TowerError::UnknownGenerator(generator.to_string()))?;
        let mut alpha = vec![0u32; self.bases.len()];
        for (d, n) in multi_index {
            let i = self
                .bases
                .iter()
                .position(|b| b.name == *d)
                .ok_or_else(|| TowerError::UnknownDerivation(d.to_string()))?;
            if *n > 0 && (self.generators[g].rules[i].is_some() || self.generators[g].kind == GeneratorKind::Defined) {
                return Err(TowerError::NotFree(generator.to_string()));
            }
            alpha[i] += n;
        }
        Ok((g, alpha))
    }
}

/// Builder: declare base derivations, then generators, then rules.
#[derive(Debug, Default)]
pub struct TowerBuilder {
    state: State,
}

impl TowerBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a base variable together with its partial derivation.
    pub fn base(&mut self, name: &str, kind: DerivKind) -> Result<Var, TowerError> {
        if !self.state.generators.is_empty() {
            panic!("base derivations must be declared before generators");
        }
        let vk = match kind {
            DerivKind::Principal => VarKind::Principal,
            DerivKind::Parametric => VarKind::Parametric,
        };
        let var = self.state.registry.register(name, vk)?;
        let idx = self.state.bases.len();
        self.state.bases.push(BaseDerivation {
            name: name.to_string(),
            var,
            kind,
        });
        self.state.symbols.insert(var, Symbol::Base(idx));
        Ok(var)
    }

    pub fn generator(&mut self, name: &str, kind: GeneratorKind) -> Result<Var, TowerError> {
        let var = self.state.registry.register(name, VarKind::Generator)?;
        let g = self.state.generators.len();
        let nb = self.state.bases.len();
        self.state.generators.push(Generator {
            name: name.to_string(),
            kind,
            rules: vec![None; nb],
        });
        let alpha = vec![0; nb];
        self.state.jets.insert((g, alpha.clone()), var);
        self.state.symbols.insert(var, Symbol::Jet { generator: g, alpha });
        Ok(var)
    }

    pub fn rule(&mut self, generator: Var, derivation: &str, value: TowerElement) -> Result<(), TowerError> {
        let Some(Symbol::Jet { generator: g, alpha }) = self.state.symbols.get(&generator).cloned() else {
            return Err(TowerError::UnknownGenerator(self.state.registry.name(generator).to_string()));
        };
        if alpha.iter().any(|&a| a > 0) {
            return Err(TowerError::UnknownGenerator(self.state.registry.name(generator).to_string()));
        }
        let i = self
            .state
            .bases
            .iter()
            .position(|b| b.name == derivation)
            .ok_or_else(|| TowerError::UnknownDerivation(derivation.to_string()))?;
        let gen = &mut self.state.generators[g];
        if gen.kind == GeneratorKind::Free {
            return Err(TowerError::RuleForFree {
                generator: gen.name.clone(),
                derivation: derivation.to_string(),
            });
        }
        gen.rules[i] = Some(value);
        Ok(())
    }

    /// Jet symbol usable in rules before the tower is built.
    pub fn jet(&mut self, generator: &str, multi_index: &[(&str, u32)]) -> Result<Var, TowerError> {
        let (g, alpha) = self.state.jet_request(generator, multi_index)?;
        Ok(self.state.jet_var(g, alpha))
    }

    pub fn var(&self, name: &str) -> Result<Var, TowerError> {
        Ok(self.state.registry.get(name)?)
    }

    pub fn names(&self) -> &[String] {
        self.state.registry.names()
    }

    /// Validates rules and commutativity (to jet depth 2).
    pub fn build(self, policy: ConsistencyPolicy) -> Result<Tower, TowerError> {
        for g in &self.state.generators {
            if g.kind == GeneratorKind::Defined {
                if let Some(i) = g.rules.iter().position(|r| r.is_none()) {
                    return Err(TowerError::MissingRule {
                        generator: g.name.clone(),
                        derivation: self.state.bases[i].name.clone(),
                    });
                }
            }
        }
        let tower = Tower {
            inner: Arc::new(RwLock::new(self.state)),
        };
        let witnesses = tower.check_commutativity(2);
        if !witnesses.is_empty() {
            match policy {
                ConsistencyPolicy::Refuse => return Err(TowerError::Inconsistent(witnesses)),
                ConsistencyPolicy::Warn => {
                    for w in &witnesses {
                        log::warn!(
                            "derivations {} and {} do not commute on {}",
                            w.first,
                            w.second,
                            w.symbol
                        );
                    }
                }
            }
        }
        Ok(tower)
    }
}

/// Shared handle to a differential field tower.
#[derive(Clone)]
pub struct Tower {
    inner: Arc<RwLock<State>>,
}

impl fmt::Debug for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.inner.read().unwrap();
        f.debug_struct("Tower")
            .field("variables", &s.registry.names())
            .finish()
    }
}

impl Tower {
    /// ℚ(principal, params) with the partial derivations and no generators.
    pub fn rational(principal: Option<&str>, params: &[&str]) -> Result<Tower, TowerError> {
        let mut b = TowerBuilder::new();
        if let Some(p) = principal {
            b.base(p, DerivKind::Principal)?;
        }
        for p in params {
            b.base(p, DerivKind::Parametric)?;
        }
        b.build(ConsistencyPolicy::Refuse)
    }

    pub fn same_as(&self, other: &Tower) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    pub fn var(&self, name: &str) -> Result<Var, TowerError> {
        Ok(self.inner.read().unwrap().registry.get(name)?)
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.inner.read().unwrap().registry.lookup(name)
    }

    pub fn element(&self, name: &str) -> Result<TowerElement, TowerError> {
        Ok(TowerElement::var(self.var(name)?))
    }

    pub fn name(&self, v: Var) -> String {
        self.inner.read().unwrap().registry.name(v).to_string()
    }

    /// Snapshot of all variable names, indexed by `Var`.
    pub fn names(&self) -> Vec<String> {
        self.inner.read().unwrap().registry.names().to_vec()
    }

    pub fn format(&self, e: &TowerElement) -> String {
        e.to_string_with(&self.names())
    }

    pub fn base_names(&self) -> Vec<String> {
        let s = self.inner.read().unwrap();
        s.bases.iter().map(|b| b.name.clone()).collect()
    }

    pub fn base_var(&self, i: usize) -> Var {
        self.inner.read().unwrap().bases[i].var
    }

    pub fn principal(&self) -> Option<String> {
        let s = self.inner.read().unwrap();
        s.bases
            .iter()
            .find(|b| b.kind == DerivKind::Principal)
            .map(|b| b.name.clone())
    }

    pub fn parametric(&self) -> Vec<String> {
        let s = self.inner.read().unwrap();
        s.bases
            .iter()
            .filter(|b| b.kind == DerivKind::Parametric)
            .map(|b| b.name.clone())
            .collect()
    }

    pub fn generator_names(&self) -> Vec<String> {
        let s = self.inner.read().unwrap();
        s.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn has_generators(&self) -> bool {
        !self.inner.read().unwrap().generators.is_empty()
    }

    pub fn generator_kind(&self, name: &str) -> Result<GeneratorKind, TowerError> {
        let s = self.inner.read().unwrap();
        s.generators
            .iter()
            .find(|g| g.name == name)
            .map(|g| g.kind)
            .ok_or_else(|| TowerError::UnknownGenerator(name.to_string()))
    }

    /// Resolves a base or composite derivation by name.
    pub fn derivation(&self, name: &str) -> Result<Derivation, TowerError> {
        let s = self.inner.read().unwrap();
        if let Some(i) = s.bases.iter().position(|b| b.name == name) {
            return Ok(Derivation {
                name: name.to_string(),
                kind: s.bases[i].kind,
                terms: vec![(i, TowerElement::one())],
            });
        }
        s.composites
            .iter()
            .find(|d| d.name == name)
            .cloned()
            .ok_or_else(|| TowerError::UnknownDerivation(name.to_string()))
    }

    pub fn has_derivation(&self, name: &str) -> bool {
        self.derivation(name).is_ok()
    }

    /// Registers `name := Σ λ_j ∂_{base_j}`. Re-registering the same
    /// combination is allowed.
    pub fn add_composite(
        &self,
        name: &str,
        combination: &[(String, TowerElement)],
    ) -> Result<Derivation, TowerError> {
        let mut terms: Vec<(usize, TowerElement)> = Vec::new();
        {
            let s = self.inner.read().unwrap();
            for (base, c) in combination {
                let i = s
                    .bases
                    .iter()
                    .position(|b| &b.name == base)
                    .ok_or_else(|| TowerError::UnknownDerivation(base.clone()))?;
                if let Some(slot) = terms.iter_mut().find(|(j, _)| *j == i) {
                    slot.1 = &slot.1 + c;
                } else {
                    terms.push((i, c.clone()));
                }
            }
        }
        terms.retain(|(_, c)| !c.is_zero());
        terms.sort_by_key(|(i, _)| *i);
        let kind = {
            let s = self.inner.read().unwrap();
            if terms.iter().any(|(i, _)| s.bases[*i].kind == DerivKind::Principal) {
                DerivKind::Principal
            } else {
                DerivKind::Parametric
            }
        };
        let d = Derivation {
            name: name.to_string(),
            kind,
            terms,
        };
        if let Ok(existing) = self.derivation(name) {
            if existing.terms == d.terms {
                return Ok(existing);
            }
            return Err(TowerError::DerivationExists(name.to_string()));
        }
        self.inner.write().unwrap().composites.push(d.clone());
        Ok(d)
    }

    /// Applies a derivation to an element.
    pub fn derive(&self, e: &TowerElement, d: &Derivation) -> TowerElement {
        let mut acc = TowerElement::zero();
        for (i, c) in &d.terms {
            let de = self.derive_base(e, *i);
            if !de.is_zero() {
                acc = &acc + &(c * &de);
            }
        }
        acc
    }

    pub fn derive_by(&self, e: &TowerElement, name: &str) -> Result<TowerElement, TowerError> {
        Ok(self.derive(e, &self.derivation(name)?))
    }

    /// Applies `d` repeatedly.
    pub fn derive_n(&self, e: &TowerElement, d: &Derivation, n: usize) -> TowerElement {
        let mut out = e.clone();
        for _ in 0..n {
            out = self.derive(&out, d);
        }
        out
    }

    fn derive_base(&self, e: &TowerElement, i: usize) -> TowerElement {
        if e.is_constant() {
            return TowerElement::zero();
        }
        let num = e.num();
        let den = e.den();
        let mut dn = TowerElement::zero();
        let mut dd = TowerElement::zero();
        for v in e.vars() {
            let dv = self.derive_symbol(v, i);
            if dv.is_zero() {
                continue;
            }
            let pn = num.derivative(v);
            if !pn.is_zero() {
                dn = &dn + &(&dv * &TowerElement::from_poly(pn));
            }
            let pd = den.derivative(v);
            if !pd.is_zero() {
                dd = &dd + &(&dv * &TowerElement::from_poly(pd));
            }
        }
        if dd.is_zero() {
            return &dn / &TowerElement::from_poly(den.clone());
        }
        &(&dn - &(e * &dd)) / &TowerElement::from_poly(den.clone())
    }

    /// Derivative of a single symbol along base direction `i`.
    fn derive_symbol(&self, v: Var, i: usize) -> TowerElement {
        let (symbol, rule) = {
            let s = self.inner.read().unwrap();
            if let Some(c) = s.cache.get(&(v, i)) {
                return c.clone();
            }
            let sym = s.symbols.get(&v).cloned().expect("symbol of the tower");
            let rule = match &sym {
                Symbol::Jet { generator, .. } => s.generators[*generator].rules[i].clone(),
                Symbol::Base(_) => None,
            };
            (sym, rule)
        };
        let out = match symbol {
            Symbol::Base(j) => {
                if i == j {
                    TowerElement::one()
                } else {
                    TowerElement::zero()
                }
            }
            Symbol::Jet { generator, alpha } => match rule {
                Some(r) => {
                    let mut out = r;
                    for (k, &a) in alpha.iter().enumerate() {
                        for _ in 0..a {
                            out = self.derive_base(&out, k);
                        }
                    }
                    out
                }
                None => {
                    let mut beta = alpha.clone();
                    beta[i] += 1;
                    TowerElement::var(self.jet_var(generator, beta))
                }
            },
        };
        self.inner.write().unwrap().cache.insert((v, i), out.clone());
        out
    }

    fn jet_var(&self, g: usize, alpha: Vec<u32>) -> Var {
        if let Some(v) = self.inner.read().unwrap().jets.get(&(g, alpha.clone())) {
            return *v;
        }
        self.inner.write().unwrap().jet_var(g, alpha)
    }

    /// Jet symbol of a generator for a multi-index given as (derivation, count).
    /// Only directions without rules may appear.
    pub fn extend_jets(&self, generator: &str, multi_index: &[(&str, u32)]) -> Result<Var, TowerError> {
        let (g, alpha) = self.inner.read().unwrap().jet_request(generator, multi_index)?;
        Ok(self.jet_var(g, alpha))
    }

    /// Position of a derivation in the canonical order: base directions in
    /// declaration order, then composites in registration order.
    pub fn derivation_index(&self, name: &str) -> Option<usize> {
        let s = self.inner.read().unwrap();
        s.bases
            .iter()
            .position(|b| b.name == name)
            .or_else(|| s.composites.iter().position(|d| d.name == name).map(|i| i + s.bases.len()))
    }

    /// Compares both orders of every pair of base derivations on each
    /// generator and each of its jets of order below `depth`.
    pub fn check_commutativity(&self, depth: u32) -> Vec<CommutativityWitness> {
        let (nb, gens): (usize, Vec<(usize, Vec<bool>)>) = {
            let s = self.inner.read().unwrap();
            (
                s.bases.len(),
                s.generators
                    .iter()
                    .enumerate()
                    .map(|(g, x)| (g, x.rules.iter().map(|r| r.is_some()).collect()))
                    .collect(),
            )
        };
        let mut out = Vec::new();
        for (g, has_rule) in gens {
            let free: Vec<usize> = (0..nb).filter(|&i| !has_rule[i]).collect();
            if free.len() == nb {
                continue;
            }
            for alpha in multi_indices(nb, &free, depth.saturating_sub(1)) {
                let v = self.jet_var(g, alpha);
                let e = TowerElement::var(v);
                for a in 0..nb {
                    for b in (a + 1)..nb {
                        // Two free directions commute by the jet construction.
                        if !has_rule[a] && !has_rule[b] {
                            continue;
                        }
                        let ab = self.derive_base(&self.derive_base(&e, a), b);
                        let ba = self.derive_base(&self.derive_base(&e, b), a);
                        if ab != ba {
                            let s = self.inner.read().unwrap();
                            out.push(CommutativityWitness {
                                symbol: s.registry.name(v).to_string(),
                                first: s.bases[a].name.clone(),
                                second: s.bases[b].name.clone(),
                                first_then_second: ab,
                                second_then_first: ba,
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Multi-indices supported on `free` with total order ≤ `max`.
fn multi_indices(n: usize, free: &[usize], max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0; n]];
    let mut frontier = out.clone();
    for _ in 0..max {
        let mut next = Vec::new();
        for a in &frontier {
            for &i in free {
                // Only extend in non-decreasing direction order to avoid duplicates.
                if a.iter().enumerate().any(|(k, &x)| x > 0 && k > i) {
                    continue;
                }
                let mut b = a.clone();
                b[i] += 1;
                next.push(b);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma() -> (Tower, Var, Var, Var, Var, Var) {
        let mut b = TowerBuilder::new();
        let x = b.base("x", DerivKind::Principal).unwrap();
        let t = b.base("t", DerivKind::Parametric).unwrap();
        let l = b.generator("l", GeneratorKind::Defined).unwrap();
        let h = b.generator("h", GeneratorKind::Defined).unwrap();
        let g = b.generator("g", GeneratorKind::Mixed).unwrap();
        let (xe, te, le, he) = (
            TowerElement::var(x),
            TowerElement::var(t),
            TowerElement::var(l),
            TowerElement::var(h),
        );
        let one = TowerElement::one();
        b.rule(l, "x", &one / &xe).unwrap();
        b.rule(l, "t", TowerElement::zero()).unwrap();
        b.rule(h, "x", &(&(&(&te - &one) / &xe) - &one) * &he).unwrap();
        b.rule(h, "t", &le * &he).unwrap();
        b.rule(g, "x", he).unwrap();
        (b.build(ConsistencyPolicy::Refuse).unwrap(), x, t, l, h, g)
    }

    #[test]
    fn gamma_tower_rules() {
        let (tw, _, _, l, h, g) = gamma();
        let he = TowerElement::var(h);
        let le = TowerElement::var(l);
        assert_eq!(tw.derive_by(&he, "t").unwrap(), &le * &he);
        assert!(tw.check_commutativity(3).is_empty());
        // (∂_t − 1) h = ∂_x(g_t − g)
        let gt = TowerElement::var(tw.extend_jets("g", &[("t", 1)]).unwrap());
        let lhs = &tw.derive_by(&he, "t").unwrap() - &he;
        let rhs = tw.derive_by(&(&gt - &TowerElement::var(g)), "x").unwrap();
        assert_eq!(lhs, rhs);
        assert!(matches!(tw.extend_jets("h", &[("x", 1)]), Err(TowerError::NotFree(_))));
        assert!(matches!(tw.extend_jets("g", &[("x", 1)]), Err(TowerError::NotFree(_))));
    }

    #[test]
    fn free_jets_are_canonical() {
        let mut b = TowerBuilder::new();
        b.base("x", DerivKind::Principal).unwrap();
        b.base("t1", DerivKind::Parametric).unwrap();
        let i1 = b.generator("I1", GeneratorKind::Free).unwrap();
        let tw = b.build(ConsistencyPolicy::Refuse).unwrap();
        let e = TowerElement::var(i1);
        let a = tw.derive_by(&tw.derive_by(&e, "x").unwrap(), "t1").unwrap();
        let b2 = tw.derive_by(&tw.derive_by(&e, "t1").unwrap(), "x").unwrap();
        assert_eq!(a, b2);
        let v = tw.extend_jets("I1", &[("t1", 1), ("x", 1)]).unwrap();
        assert_eq!(tw.extend_jets("I1", &[("x", 1), ("t1", 1)]).unwrap(), v);
        assert_eq!(tw.name(v), "I1_x_t1");
        assert_eq!(TowerElement::var(v), a);
        assert!(tw.check_commutativity(3).is_empty());
    }

    #[test]
    fn inconsistent_rules_detected() {
        let mut b = TowerBuilder::new();
        b.base("x", DerivKind::Principal).unwrap();
        let t = b.base("t", DerivKind::Parametric).unwrap();
        let g = b.generator("g", GeneratorKind::Defined).unwrap();
        b.rule(g, "x", TowerElement::var(t)).unwrap();
        b.rule(g, "t", TowerElement::zero()).unwrap();
        match b.build(ConsistencyPolicy::Refuse) {
            Err(TowerError::Inconsistent(w)) => {
                assert_eq!(w.len(), 1);
                assert_eq!(w[0].symbol, "g");
                assert_eq!(w[0].first_then_second, TowerElement::one());
                assert!(w[0].second_then_first.is_zero());
            }
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn missing_rule_rejected() {
        let mut b = TowerBuilder::new();
        b.base("x", DerivKind::Principal).unwrap();
        b.base("t", DerivKind::Parametric).unwrap();
        let g = b.generator("g", GeneratorKind::Defined).unwrap();
        b.rule(g, "x", TowerElement::one()).unwrap();
        assert!(matches!(
            b.build(ConsistencyPolicy::Refuse),
            Err(TowerError::MissingRule { .. })
        ));
    }

    #[test]
    fn composite_derivations() {
        let tw = Tower::rational(None, &["t1", "t2"]).unwrap();
        let t1 = tw.element("t1").unwrap();
        let d2 = tw
            .add_composite("d2", &[("t1".into(), t1.clone()), ("t2".into(), TowerElement::one())])
            .unwrap();
        assert_eq!(tw.derive(&t1, &d2), t1);
        assert!(tw.add_composite("d2", &[("t2".into(), TowerElement::one())]).is_err());
    }
}
