//! The module side of the correspondence: the multiplicative-monoid action
//! of K on F_p^K, enumeration of all invariant submodules with their
//! meet/join lattice, Gaussian binomials with the resulting cardinality
//! bound, and assembly of the full lattice as a direct product over the
//! codomain factors.

use crate::clonoid::ClonoidSlice;
use crate::error::{Error, Result};
use crate::ffield::{ensure_coprime, gcd, FieldSpec, ProductRingSpec, RingElement};
use crate::linalg::{all_subspaces, encode_basis, vector_of_code, Matrix, SubspaceBasis};
use num_bigint::BigUint;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// The 0/1 matrix of f -> (tau_a * f), acting on vectors indexed by K:
/// row x has its single 1 in column a*x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionMatrix {
    element: RingElement,
    matrix: Matrix,
}

impl ActionMatrix {
    pub fn element(&self) -> &RingElement {
        &self.element
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

pub fn action_matrix(
    a: &RingElement,
    ring: &ProductRingSpec,
    field: &FieldSpec,
) -> Result<ActionMatrix> {
    ring.check_member(a)?;
    let size = ring.order() as usize;
    let a_idx = ring.index_of(a);
    let mut matrix = Matrix::zeros(field.clone(), size, size);
    for x in 0..size {
        matrix.set(x, ring.mul_index(a_idx, x), 1);
    }
    Ok(ActionMatrix {
        element: a.clone(),
        matrix,
    })
}

/// Applies f -> (tau_a * f) to a coordinate vector without materializing the
/// matrix: w[x] = v[a*x].
fn act_on_vector(ring: &ProductRingSpec, a_idx: usize, v: &[u64]) -> Vec<u64> {
    (0..v.len()).map(|x| v[ring.mul_index(a_idx, x)]).collect()
}

/// An invariant subspace of F_p^K under the whole monoid action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Submodule {
    basis: SubspaceBasis,
}

impl Submodule {
    pub fn basis(&self) -> &SubspaceBasis {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.rank()
    }
}

pub(crate) fn is_invariant(basis: &SubspaceBasis, ring: &ProductRingSpec) -> bool {
    let size = ring.order() as usize;
    for a_idx in 0..size {
        for row in basis.rows() {
            if !basis.contains(&act_on_vector(ring, a_idx, row)) {
                return false;
            }
        }
    }
    true
}

/// The smallest submodule containing `v`: the span of the monoid orbit
/// {M_a v : a in K}, which is already invariant because tau_a tau_b =
/// tau_{ab} and spans commute with linear combinations.
pub fn cyclic_submodule(v: &[u64], ring: &ProductRingSpec, field: &FieldSpec) -> Result<Submodule> {
    let size = ring.order() as usize;
    if v.len() != size {
        return Err(Error::WrongLength {
            expected: size,
            got: v.len(),
        });
    }
    for &c in v {
        field.element(c)?;
    }
    let mut basis = SubspaceBasis::new(field.clone(), size);
    for a_idx in 0..size {
        basis.insert(&act_on_vector(ring, a_idx, v));
    }
    Ok(Submodule { basis })
}

/// Meet of two submodules: the subspace intersection (invariance is
/// inherited).
pub fn sub_meet(u: &Submodule, v: &Submodule) -> Result<Submodule> {
    Ok(Submodule {
        basis: u.basis.intersection(&v.basis)?,
    })
}

/// Join of two submodules: the span of the union. No closure step is needed
/// since a sum of invariant subspaces is invariant (apply M_a termwise).
pub fn sub_join(u: &Submodule, v: &Submodule) -> Result<Submodule> {
    Ok(Submodule {
        basis: u.basis.sum(&v.basis)?,
    })
}

/// How `enumerate_submodules` finds the lattice elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Cyclic submodules of every vector, closed under pairwise joins.
    JoinClosure,
    /// Every subspace of F_p^K, filtered by invariance.
    BruteForce,
    /// Run both and require element-for-element agreement.
    Both,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Strategy::JoinClosure => "join-closure",
            Strategy::BruteForce => "brute-force",
            Strategy::Both => "both",
        };
        f.write_str(name)
    }
}

/// The complete lattice of invariant submodules, canonically ordered with
/// its covering relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmoduleLattice {
    field: FieldSpec,
    ring: ProductRingSpec,
    elements: Vec<Submodule>,
    covers: Vec<(usize, usize)>,
}

impl SubmoduleLattice {
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn ring(&self) -> &ProductRingSpec {
        &self.ring
    }

    pub fn elements(&self) -> &[Submodule] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Covering pairs (i, j) meaning element i is covered by element j.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn index_of(&self, sub: &Submodule) -> Option<usize> {
        self.elements.iter().position(|e| e == sub)
    }

    pub fn bottom(&self) -> &Submodule {
        &self.elements[0]
    }

    pub fn top(&self) -> &Submodule {
        self.elements.last().expect("lattice is never empty")
    }

    /// Graphviz rendering of the Hasse diagram, nodes labeled by rank.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
        for (i, e) in self.elements.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", e.rank());
        }
        for &(lo, hi) in &self.covers {
            let _ = writeln!(out, "  n{lo} -> n{hi};");
        }
        out.push_str("}\n");
        out
    }
}

impl Serialize for SubmoduleLattice {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Elem<'a> {
            rank: usize,
            basis: &'a [Vec<u64>],
        }
        let mut state = serializer.serialize_struct("SubmoduleLattice", 5)?;
        state.serialize_field("field", &self.field)?;
        state.serialize_field("K", &self.ring)?;
        state.serialize_field("count", &self.elements.len())?;
        let elems: Vec<Elem> = self
            .elements
            .iter()
            .map(|e| Elem {
                rank: e.rank(),
                basis: e.basis.rows(),
            })
            .collect();
        state.serialize_field("elements", &elems)?;
        state.serialize_field("covers", &self.covers)?;
        state.end()
    }
}

fn covering_pairs(subspaces: &[Submodule]) -> Vec<(usize, usize)> {
    let n = subspaces.len();
    let mut below = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            below[i][j] = i != j
                && subspaces[i].rank() < subspaces[j].rank()
                && subspaces[i].basis.is_subspace_of(&subspaces[j].basis);
        }
    }
    let mut covers = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if below[i][j] && !(0..n).any(|t| below[i][t] && below[t][j]) {
                covers.push((i, j));
            }
        }
    }
    covers
}

fn strategy_join_closure(
    field: &FieldSpec,
    ring: &ProductRingSpec,
    budget: usize,
) -> Result<Vec<Submodule>> {
    let dim = ring.order() as usize;
    let total = u32::try_from(dim)
        .ok()
        .and_then(|d| field.q().checked_pow(d))
        .filter(|&t| t as usize <= budget)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "{}^{dim} seed vectors exceed the budget of {budget}",
                field.q()
            ))
        })?;
    let mut by_key: BTreeMap<Vec<u64>, Submodule> = BTreeMap::new();
    for code in 0..total {
        let v = vector_of_code(field, dim, code);
        let sub = cyclic_submodule(&v, ring, field)?;
        by_key.insert(encode_basis(&sub.basis), sub);
    }
    // Close under pairwise joins; complete because every submodule is the
    // join of the cyclic submodules of its elements.
    loop {
        let current: Vec<Submodule> = by_key.values().cloned().collect();
        let mut grew = false;
        for i in 0..current.len() {
            for j in i + 1..current.len() {
                let join = sub_join(&current[i], &current[j])?;
                let key = encode_basis(&join.basis);
                if !by_key.contains_key(&key) {
                    if by_key.len() >= budget {
                        return Err(Error::BudgetExceeded(format!(
                            "more than {budget} submodules during join closure"
                        )));
                    }
                    by_key.insert(key, join);
                    grew = true;
                }
            }
        }
        if !grew {
            return Ok(by_key.into_values().collect());
        }
    }
}

fn strategy_brute_force(
    field: &FieldSpec,
    ring: &ProductRingSpec,
    budget: usize,
) -> Result<Vec<Submodule>> {
    let dim = ring.order() as usize;
    Ok(all_subspaces(field, dim, budget)?
        .into_iter()
        .filter(|s| is_invariant(s, ring))
        .map(|basis| Submodule { basis })
        .collect())
}

/// Enumerates every F_p[K^x]-submodule of F_p^K.
pub fn enumerate_submodules(
    field: &FieldSpec,
    ring: &ProductRingSpec,
    strategy: Strategy,
    budget: usize,
) -> Result<SubmoduleLattice> {
    if gcd(field.q(), ring.order()) != 1 {
        return Err(Error::NotCoprime {
            k_order: ring.order(),
            f_order: field.q(),
        });
    }
    let mut elements = match strategy {
        Strategy::JoinClosure => strategy_join_closure(field, ring, budget)?,
        Strategy::BruteForce => strategy_brute_force(field, ring, budget)?,
        Strategy::Both => {
            let mut a = strategy_join_closure(field, ring, budget)?;
            let mut b = strategy_brute_force(field, ring, budget)?;
            a.sort_by(|x, y| x.basis.canonical_cmp(&y.basis));
            b.sort_by(|x, y| x.basis.canonical_cmp(&y.basis));
            if a != b {
                return Err(Error::Internal(
                    "join-closure and brute-force enumerations disagree".into(),
                ));
            }
            a
        }
    };
    elements.sort_by(|x, y| x.basis.canonical_cmp(&y.basis));
    let covers = covering_pairs(&elements);
    Ok(SubmoduleLattice {
        field: field.clone(),
        ring: ring.clone(),
        elements,
        covers,
    })
}

/// n-choose-k counted q-analogously: the number of k-dimensional subspaces
/// of an n-dimensional space over a field with q elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussianBinomial {
    pub n: u64,
    pub k: u64,
    pub q: u64,
    pub value: BigUint,
}

pub fn gaussian_binomial(n: u64, k: u64, q: u64) -> Result<GaussianBinomial> {
    if q < 2 {
        return Err(Error::BadRange(format!("q must be at least 2, got {q}")));
    }
    if k > n {
        return Err(Error::BadRange(format!("need 0 <= k <= n, got k={k}, n={n}")));
    }
    let qb = BigUint::from(q);
    let mut value = BigUint::from(1u32);
    for i in 1..=k {
        let numerator = qb.pow((n - k + i) as u32) - 1u32;
        let denominator = qb.pow(i as u32) - 1u32;
        value *= numerator;
        // Each partial product is itself a Gaussian binomial, so the
        // division is exact.
        if (&value % &denominator) != BigUint::from(0u32) {
            return Err(Error::Internal("inexact Gaussian binomial division".into()));
        }
        value /= denominator;
    }
    Ok(GaussianBinomial { n, k, q, value })
}

/// The printed upper bound for the number of linearly closed clonoids:
/// the product over the codomain factors of the sums of Gaussian binomials
/// with 1 <= r <= |K|. The sum deliberately starts at r = 1, exactly as
/// stated, even though the zero submodule also occurs.
pub fn clonoid_count_bound(f: &ProductRingSpec, k: &ProductRingSpec) -> Result<BigUint> {
    ensure_coprime(k, f)?;
    let n = k.order();
    let mut bound = BigUint::from(1u32);
    for field in f.factors() {
        let mut sum = BigUint::from(0u32);
        for r in 1..=n {
            sum += gaussian_binomial(n, r, field.q())?.value;
        }
        bound *= sum;
    }
    Ok(bound)
}

/// The direct product of per-factor submodule lattices: elements are index
/// tuples into the factors, ordered componentwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductLattice {
    factors: Vec<SubmoduleLattice>,
    codomain: ProductRingSpec,
    elements: Vec<Vec<usize>>,
    covers: Vec<(usize, usize)>,
}

impl ProductLattice {
    pub fn factors(&self) -> &[SubmoduleLattice] {
        &self.factors
    }

    pub fn ring(&self) -> &ProductRingSpec {
        self.factors[0].ring()
    }

    /// The codomain F whose factor fields are the lattice fields, in order.
    pub fn codomain(&self) -> &ProductRingSpec {
        &self.codomain
    }

    /// Index tuples into the factor lattices, in odometer order.
    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    /// psi: reassembles an index tuple into the arity-1 slice whose
    /// components are the chosen submodules.
    pub fn assemble_slice(&self, tuple: &[usize]) -> Result<ClonoidSlice> {
        if tuple.len() != self.factors.len() {
            return Err(Error::WrongLength {
                expected: self.factors.len(),
                got: tuple.len(),
            });
        }
        let parts = self
            .factors
            .iter()
            .zip(tuple)
            .map(|(lat, &i)| {
                lat.elements()
                    .get(i)
                    .map(|s| s.basis().clone())
                    .ok_or_else(|| Error::BadRange(format!("no lattice element {i}")))
            })
            .collect::<Result<Vec<_>>>()?;
        ClonoidSlice::from_parts(self.ring().clone(), self.codomain.clone(), 1, parts)
    }

    /// rho: projects an arity-1 slice to its tuple of factor indices.
    pub fn project_slice(&self, slice: &ClonoidSlice) -> Result<Vec<usize>> {
        let parts = unary_fingerprint(slice)?;
        parts
            .iter()
            .zip(&self.factors)
            .map(|(sub, lat)| {
                lat.index_of(sub).ok_or_else(|| {
                    Error::Internal("unary part is missing from the enumerated lattice".into())
                })
            })
            .collect()
    }

    /// Graphviz rendering, nodes labeled by the per-factor ranks.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=BT;\n");
        for (i, tuple) in self.elements.iter().enumerate() {
            let ranks: Vec<String> = tuple
                .iter()
                .zip(&self.factors)
                .map(|(&t, lat)| lat.elements()[t].rank().to_string())
                .collect();
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", ranks.join(","));
        }
        for &(lo, hi) in &self.covers {
            let _ = writeln!(out, "  n{lo} -> n{hi};");
        }
        out.push_str("}\n");
        out
    }
}

impl Serialize for ProductLattice {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut state = serializer.serialize_struct("ProductLattice", 5)?;
        state.serialize_field("F", &self.codomain)?;
        state.serialize_field("K", self.ring())?;
        state.serialize_field("size", &self.elements.len())?;
        state.serialize_field("elements", &self.elements)?;
        state.serialize_field("covers", &self.covers)?;
        state.end()
    }
}

/// Builds the direct product of the per-factor lattices.
pub fn lattice_assemble(factors: Vec<SubmoduleLattice>) -> Result<ProductLattice> {
    if factors.is_empty() {
        return Err(Error::EmptyProduct);
    }
    if factors.iter().any(|l| l.ring() != factors[0].ring()) {
        return Err(Error::MixedDomains);
    }
    let codomain = ProductRingSpec::new(factors.iter().map(|l| l.field().clone()).collect())?;
    let sizes: Vec<usize> = factors.iter().map(|l| l.len()).collect();
    let mut elements = Vec::new();
    let mut tuple = vec![0usize; factors.len()];
    'odometer: loop {
        elements.push(tuple.clone());
        let mut j = tuple.len();
        while j > 0 {
            j -= 1;
            tuple[j] += 1;
            if tuple[j] < sizes[j] {
                continue 'odometer;
            }
            tuple[j] = 0;
        }
        break;
    }
    // Componentwise order; covers differ in exactly one coordinate, by a
    // cover of that factor.
    let factor_covers: Vec<std::collections::BTreeSet<(usize, usize)>> = factors
        .iter()
        .map(|l| l.covers().iter().copied().collect())
        .collect();
    let mut covers = Vec::new();
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut delta = None;
            let mut comparable = true;
            for (t, (&x, &y)) in a.iter().zip(b).enumerate() {
                if x == y {
                    continue;
                }
                if delta.is_some() {
                    comparable = false;
                    break;
                }
                delta = Some((t, x, y));
            }
            if let (true, Some((t, x, y))) = (comparable, delta) {
                if factor_covers[t].contains(&(x, y)) {
                    covers.push((i, j));
                }
            }
        }
    }
    Ok(ProductLattice {
        factors,
        codomain,
        elements,
        covers,
    })
}

/// Reinterprets the arity-1 slice of a clonoid as its tuple of invariant
/// submodules, verifying invariance (a failure indicates a bug in the
/// closure computation, not a user error).
pub fn unary_fingerprint(slice: &ClonoidSlice) -> Result<Vec<Submodule>> {
    if slice.arity() != 1 {
        return Err(Error::BadArity(format!(
            "fingerprints are taken at arity 1, got {}",
            slice.arity()
        )));
    }
    slice
        .parts()
        .iter()
        .map(|part| {
            if !is_invariant(part, slice.domain()) {
                return Err(Error::Internal(
                    "arity-1 slice is not invariant under the monoid action".into(),
                ));
            }
            Ok(Submodule {
                basis: part.clone(),
            })
        })
        .collect()
}
