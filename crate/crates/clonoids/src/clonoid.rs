//! The closure operator for linearly closed clonoids, realized arity by
//! arity as canonical subspace spans, together with the unary-generation
//! machinery: diagonal extensions t_k and their alternating sums r_k, line
//! products and interpolation along them, and the executable check that the
//! arity-1 part generates every slice.

use crate::absorbing::is_absorbing;
use crate::error::{Error, Result};
use crate::ffield::{ensure_coprime, FieldSpec, ProductRingSpec, RingElement};
use crate::funcspace::{
    encode_point, f_minus, f_plus, point_count, substitute, FiniteFunction, PointIndex,
};
use crate::linalg::{Matrix, SubspaceBasis};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;

/// The arity-k part of a clonoid: one canonical subspace of F_i^(K^k) per
/// factor of the codomain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClonoidSlice {
    domain: ProductRingSpec,
    codomain: ProductRingSpec,
    arity: usize,
    parts: Vec<SubspaceBasis>,
}

impl ClonoidSlice {
    /// Assembles a slice from per-factor bases; the parts must match the
    /// codomain factors and the ambient dimension |K|^arity.
    pub(crate) fn from_parts(
        domain: ProductRingSpec,
        codomain: ProductRingSpec,
        arity: usize,
        parts: Vec<SubspaceBasis>,
    ) -> Result<Self> {
        if parts.len() != codomain.num_factors() {
            return Err(Error::WrongLength {
                expected: codomain.num_factors(),
                got: parts.len(),
            });
        }
        let dim = point_count(&domain, arity)?;
        for (part, field) in parts.iter().zip(codomain.factors()) {
            if part.field() != field || part.ambient_dim() != dim {
                return Err(Error::ShapeMismatch(
                    "part basis does not match the slice shape".into(),
                ));
            }
        }
        Ok(ClonoidSlice {
            domain,
            codomain,
            arity,
            parts,
        })
    }

    pub fn domain(&self) -> &ProductRingSpec {
        &self.domain
    }

    pub fn codomain(&self) -> &ProductRingSpec {
        &self.codomain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn parts(&self) -> &[SubspaceBasis] {
        &self.parts
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.rank()).collect()
    }

    /// The basis rows lifted back to functions: row v of part i becomes the
    /// function whose component i is v and whose other components vanish.
    /// These functions generate the slice under left combinations alone.
    pub fn basis_functions(&self) -> Vec<FiniteFunction> {
        let mut out = Vec::new();
        for (i, part) in self.parts.iter().enumerate() {
            for row in part.rows() {
                out.push(
                    FiniteFunction::from_single_component(
                        self.domain.clone(),
                        self.codomain.clone(),
                        self.arity,
                        i,
                        row,
                    )
                    .expect("basis rows are valid tables"),
                );
            }
        }
        out
    }
}

impl Serialize for ClonoidSlice {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Part<'a> {
            field: &'a FieldSpec,
            rank: usize,
            basis: &'a [Vec<u64>],
        }
        let mut state = serializer.serialize_struct("ClonoidSlice", 5)?;
        state.serialize_field("K", &self.domain)?;
        state.serialize_field("F", &self.codomain)?;
        state.serialize_field("arity", &self.arity)?;
        state.serialize_field("ranks", &self.ranks())?;
        let parts: Vec<Part> = self
            .parts
            .iter()
            .zip(self.codomain.factors())
            .map(|(p, field)| Part {
                field,
                rank: p.rank(),
                basis: p.rows(),
            })
            .collect();
        state.serialize_field("parts", &parts)?;
        state.end()
    }
}

fn check_generator_shapes(
    domain: &ProductRingSpec,
    codomain: &ProductRingSpec,
    generators: &[FiniteFunction],
) -> Result<()> {
    for g in generators {
        if g.domain() != domain || g.codomain() != codomain {
            return Err(Error::ShapeMismatch(
                "generator has a different domain or codomain".into(),
            ));
        }
    }
    Ok(())
}

/// Visits every tuple of matrices (A_1,...,A_m), A_j over the j-th factor
/// field with the given shape, in a fixed odometer order (last factor
/// fastest).
fn for_each_matrix_tuple(
    domain: &ProductRingSpec,
    rows: usize,
    cols: usize,
    mut visit: impl FnMut(&[Matrix]) -> Result<()>,
) -> Result<()> {
    let counts = domain
        .factors()
        .iter()
        .map(|f| {
            Matrix::count(f, rows, cols).ok_or_else(|| {
                Error::BudgetExceeded(format!(
                    "too many {rows}x{cols} matrices over GF({})",
                    f.q()
                ))
            })
        })
        .collect::<Result<Vec<u64>>>()?;
    let m = counts.len();
    let mut indices = vec![0u64; m];
    'tuples: loop {
        let mats: Vec<Matrix> = indices
            .iter()
            .zip(domain.factors())
            .map(|(&i, f)| Matrix::from_index(f.clone(), rows, cols, i))
            .collect();
        visit(&mats)?;
        let mut j = m;
        while j > 0 {
            j -= 1;
            indices[j] += 1;
            if indices[j] < counts[j] {
                continue 'tuples;
            }
            indices[j] = 0;
        }
        return Ok(());
    }
}

/// The arity-k slice of the clonoid generated by `generators`, as the span
/// of all substitution instances.
///
/// One pass suffices: substitutions compose blockwise (applying A and then B
/// is applying the tuple of products A_j B_j, again an admissible tuple) and
/// commute with linear combinations, so the span of all substitution
/// instances of the generators is closed under both defining conditions at
/// this arity.
pub fn closure_slice(
    domain: &ProductRingSpec,
    codomain: &ProductRingSpec,
    generators: &[FiniteFunction],
    arity: usize,
) -> Result<ClonoidSlice> {
    ensure_coprime(domain, codomain)?;
    if arity == 0 {
        return Err(Error::BadArity("slice arity must be at least 1".into()));
    }
    check_generator_shapes(domain, codomain, generators)?;
    let dim = point_count(domain, arity)?;
    let mut parts: Vec<SubspaceBasis> = codomain
        .factors()
        .iter()
        .map(|f| SubspaceBasis::new(f.clone(), dim))
        .collect();
    for g in generators {
        for_each_matrix_tuple(domain, g.arity(), arity, |mats| {
            let image = substitute(g, mats)?;
            for (i, part) in parts.iter_mut().enumerate() {
                part.insert(&image.component_vector(i));
            }
            Ok(())
        })?;
    }
    Ok(ClonoidSlice {
        domain: domain.clone(),
        codomain: codomain.clone(),
        arity,
        parts,
    })
}

/// True iff every component of f reduces to zero against the corresponding
/// part basis.
pub fn member(f: &FiniteFunction, slice: &ClonoidSlice) -> Result<bool> {
    if f.domain() != &slice.domain || f.codomain() != &slice.codomain || f.arity() != slice.arity {
        return Err(Error::ShapeMismatch(
            "function shape does not match the slice".into(),
        ));
    }
    Ok(slice
        .parts
        .iter()
        .enumerate()
        .all(|(i, part)| part.contains(&f.component_vector(i))))
}

/// A product of lines: one nonzero direction vector per factor, normalized
/// so its first nonzero coordinate is 1, which makes the representative
/// unique per product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineProduct {
    domain: ProductRingSpec,
    arity: usize,
    generators: Vec<Vec<u64>>,
}

impl LineProduct {
    pub fn new(domain: ProductRingSpec, arity: usize, generators: Vec<Vec<u64>>) -> Result<Self> {
        if generators.len() != domain.num_factors() {
            return Err(Error::WrongLength {
                expected: domain.num_factors(),
                got: generators.len(),
            });
        }
        let normalized = generators
            .into_iter()
            .zip(domain.factors())
            .map(|(v, field)| {
                if v.len() != arity {
                    return Err(Error::WrongLength {
                        expected: arity,
                        got: v.len(),
                    });
                }
                for &c in &v {
                    field.element(c)?;
                }
                let Some(first) = v.iter().position(|&c| c != 0) else {
                    return Err(Error::BadRange("line direction must be nonzero".into()));
                };
                let scale = field.inv_raw(v[first]);
                Ok(v.iter().map(|&c| field.mul_raw(scale, c)).collect())
            })
            .collect::<Result<Vec<Vec<u64>>>>()?;
        Ok(LineProduct {
            domain,
            arity,
            generators: normalized,
        })
    }

    /// The product of the first standard basis lines.
    pub fn standard(domain: ProductRingSpec, arity: usize) -> Self {
        let generators = domain
            .factors()
            .iter()
            .map(|_| {
                let mut v = vec![0u64; arity];
                v[0] = 1;
                v
            })
            .collect();
        LineProduct {
            domain,
            arity,
            generators,
        }
    }

    pub fn domain(&self) -> &ProductRingSpec {
        &self.domain
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn generators(&self) -> &[Vec<u64>] {
        &self.generators
    }

    /// The grid point (lambda_1 b_1, ..., lambda_m b_m) for the scalar tuple
    /// lambda, returned as arguments in point-major order.
    pub fn grid_point(&self, lambda: &RingElement) -> Vec<RingElement> {
        (0..self.arity)
            .map(|i| {
                let coords = self
                    .domain
                    .factors()
                    .iter()
                    .enumerate()
                    .map(|(j, field)| {
                        field
                            .element(field.mul_raw(lambda.coord(j).value(), self.generators[j][i]))
                            .expect("products stay in the field")
                    })
                    .collect();
                self.domain.element(coords).expect("grid points are valid")
            })
            .collect()
    }

    /// Point indices of the whole scalar grid, in the element order of K.
    pub fn grid_indices(&self) -> Vec<PointIndex> {
        self.domain
            .elements()
            .map(|lambda| {
                encode_point(&self.domain, &self.grid_point(&lambda)).expect("grid points are valid")
            })
            .collect()
    }
}

/// All distinct products of lines of K^n: the per-factor projective
/// representatives combined in every way, factor 1 outermost.
pub fn lines_enumerate(domain: &ProductRingSpec, arity: usize) -> Result<Vec<LineProduct>> {
    if arity == 0 {
        return Err(Error::BadArity("line products need arity at least 1".into()));
    }
    let per_factor: Vec<Vec<Vec<u64>>> = domain
        .factors()
        .iter()
        .map(|field| {
            let total = point_count(&ProductRingSpec::single(field.clone()), arity)?;
            let mut reps = Vec::new();
            for code in 1..total {
                // Coordinate 1 varies fastest in this enumeration; keep the
                // representatives whose first nonzero coordinate is 1.
                let v: Vec<u64> = (0..arity)
                    .rev()
                    .scan(code, |c, _| {
                        let digit = *c % field.q() as usize;
                        *c /= field.q() as usize;
                        Some(digit as u64)
                    })
                    .collect::<Vec<_>>()
                    .into_iter()
                    .rev()
                    .collect();
                if v.iter().find(|&&c| c != 0) == Some(&1) {
                    reps.push(v);
                }
            }
            Ok(reps)
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let m = per_factor.len();
    let mut choice = vec![0usize; m];
    'combos: loop {
        let generators: Vec<Vec<u64>> = choice
            .iter()
            .zip(&per_factor)
            .map(|(&c, reps)| reps[c].clone())
            .collect();
        out.push(LineProduct {
            domain: domain.clone(),
            arity,
            generators,
        });
        let mut j = m;
        while j > 0 {
            j -= 1;
            choice[j] += 1;
            if choice[j] < per_factor[j].len() {
                continue 'combos;
            }
            choice[j] = 0;
        }
        return Ok(out);
    }
}

/// The function agreeing with f on the scalar grid of the line product and
/// vanishing elsewhere.
pub fn line_component(f: &FiniteFunction, line: &LineProduct) -> Result<FiniteFunction> {
    if line.domain() != f.domain() || line.arity() != f.arity() {
        return Err(Error::ShapeMismatch(
            "line product does not match the function".into(),
        ));
    }
    let mut table = vec![f.codomain().zero(); f.table().len()];
    for idx in line.grid_indices() {
        table[idx.0] = f.table()[idx.0].clone();
    }
    FiniteFunction::new(f.domain().clone(), f.codomain().clone(), f.arity(), table)
}

/// Recovers invertible witnesses A_j with A_j b_j = e_1 such that
/// substituting them into g reproduces f, where f lives on the grid of
/// `line` and g lives on the standard e_1 grid with matching values.
pub fn line_transport(
    f: &FiniteFunction,
    line: &LineProduct,
    g: &FiniteFunction,
) -> Result<Vec<Matrix>> {
    if !f.same_shape_as(g) {
        return Err(Error::ShapeMismatch("f and g must have the same shape".into()));
    }
    if line.domain() != f.domain() || line.arity() != f.arity() {
        return Err(Error::ShapeMismatch(
            "line product does not match the functions".into(),
        ));
    }
    let n = f.arity();
    let standard = LineProduct::standard(f.domain().clone(), n);
    let f_grid: BTreeSet<usize> = line.grid_indices().iter().map(|i| i.0).collect();
    let g_grid: BTreeSet<usize> = standard.grid_indices().iter().map(|i| i.0).collect();
    for (idx, value) in f.table().iter().enumerate() {
        if !value.is_zero() && !f_grid.contains(&idx) {
            return Err(Error::NotSupportedOnLines);
        }
    }
    for (idx, value) in g.table().iter().enumerate() {
        if !value.is_zero() && !g_grid.contains(&idx) {
            return Err(Error::NotSupportedOnLines);
        }
    }
    for lambda in f.domain().elements() {
        let fv = f.eval(&line.grid_point(&lambda))?;
        let gv = g.eval(&standard.grid_point(&lambda))?;
        if fv != gv {
            return Err(Error::ValueMismatch);
        }
    }
    line.generators()
        .iter()
        .zip(f.domain().factors())
        .map(|(b, field)| {
            // Extend b to a basis by greedy standard vectors, invert the
            // change of basis so that b lands on e_1.
            let mut chosen: Vec<Vec<u64>> = vec![b.clone()];
            let mut span = SubspaceBasis::spanned_by(field.clone(), n, &chosen);
            for t in 0..n {
                if chosen.len() == n {
                    break;
                }
                let mut e = vec![0u64; n];
                e[t] = 1;
                if span.insert(&e) {
                    chosen.push(e);
                }
            }
            let mut m = Matrix::zeros(field.clone(), n, n);
            for (c, v) in chosen.iter().enumerate() {
                for (r, &x) in v.iter().enumerate() {
                    m.set(r, c, x);
                }
            }
            m.inverse()
                .ok_or_else(|| Error::Internal("basis extension was singular".into()))
        })
        .collect()
}

fn check_unary_absorbing(g: &FiniteFunction) -> Result<()> {
    if g.arity() != 1 {
        return Err(Error::BadArity(format!(
            "expected a unary function, got arity {}",
            g.arity()
        )));
    }
    let all: BTreeSet<usize> = (0..g.domain().num_factors()).collect();
    if !is_absorbing(g, &all) {
        return Err(Error::NotAbsorbing);
    }
    Ok(())
}

/// The k-ary diagonal extension of a unary 0-absorbing g: equal to
/// g(lambda) on the points (lambda_1 e_1, ..., lambda_m e_1) and zero
/// elsewhere. Since the e_1 grid is exactly the set of points whose
/// arguments 2..k vanish, the table is a direct transcription.
pub fn build_t_k(g: &FiniteFunction, k: usize) -> Result<FiniteFunction> {
    check_unary_absorbing(g)?;
    if k == 0 {
        return Err(Error::BadArity("t_k needs k >= 1".into()));
    }
    let domain = g.domain().clone();
    FiniteFunction::from_fn(domain, g.codomain().clone(), k, |point| {
        if point[1..].iter().all(|x| x.is_zero()) {
            g.eval(&point[..1]).expect("first argument is a valid point")
        } else {
            g.codomain().zero()
        }
    })
}

/// The alternating sum over the blockwise maps
///   u_a: (x_1,...,x_k) -> (x_1 - a x_2, x_3, ..., x_k)        (sign +)
///   w_a: (x_1,...,x_k) -> (a x_2, x_3, ..., x_k), a != 0      (sign -)
/// applied to t_{k-1}; pointwise it equals (prod q_i) * t_k.
pub fn build_r_k(g: &FiniteFunction, k: usize) -> Result<FiniteFunction> {
    check_unary_absorbing(g)?;
    if k < 2 {
        return Err(Error::BadArity("r_k needs k >= 2".into()));
    }
    let t_prev = build_t_k(g, k - 1)?;
    let domain = g.domain().clone();

    // Per factor: the maps of P^[k] as (k-1) x k matrices plus their sign
    // contribution.
    let families: Vec<Vec<(Matrix, bool)>> = domain
        .factors()
        .iter()
        .map(|field| {
            let mut fam = Vec::new();
            for a in 0..field.q() {
                let mut m = Matrix::zeros(field.clone(), k - 1, k);
                m.set(0, 0, 1);
                m.set(0, 1, field.neg_raw(a));
                for t in 1..k - 1 {
                    m.set(t, t + 1, 1);
                }
                fam.push((m, false));
            }
            for a in 1..field.q() {
                let mut m = Matrix::zeros(field.clone(), k - 1, k);
                m.set(0, 1, a);
                for t in 1..k - 1 {
                    m.set(t, t + 1, 1);
                }
                fam.push((m, true));
            }
            fam
        })
        .collect();

    let mut acc = FiniteFunction::zero(domain.clone(), g.codomain().clone(), k)?;
    let m = families.len();
    let mut choice = vec![0usize; m];
    'tuples: loop {
        let mats: Vec<Matrix> = choice
            .iter()
            .zip(&families)
            .map(|(&c, fam)| fam[c].0.clone())
            .collect();
        let negatives = choice
            .iter()
            .zip(&families)
            .filter(|(&c, fam)| fam[c].1)
            .count();
        let image = substitute(&t_prev, &mats)?;
        acc = if negatives % 2 == 0 {
            f_plus(&acc, &image)?
        } else {
            f_minus(&acc, &image)?
        };
        let mut j = m;
        while j > 0 {
            j -= 1;
            choice[j] += 1;
            if choice[j] < families[j].len() {
                continue 'tuples;
            }
            choice[j] = 0;
        }
        return Ok(acc);
    }
}

/// Per-arity verdict of the unary-generation check.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct UnaryVerdict {
    pub k: usize,
    #[serde(rename = "rank_C")]
    pub rank_c: Vec<usize>,
    pub rank_unary: Vec<usize>,
    pub equal: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct UnaryCheckReport {
    pub verdicts: Vec<UnaryVerdict>,
    pub all_equal: bool,
}

/// Verifies, for each k up to `k_max`, that the slice generated by the given
/// functions coincides with the slice generated by the basis of their unary
/// part.
pub fn unary_generation_check(
    domain: &ProductRingSpec,
    codomain: &ProductRingSpec,
    generators: &[FiniteFunction],
    k_max: usize,
    budget: usize,
) -> Result<UnaryCheckReport> {
    ensure_coprime(domain, codomain)?;
    if k_max == 0 {
        return Err(Error::BadArity("k_max must be at least 1".into()));
    }
    for k in 1..=k_max {
        let entries = point_count(domain, k)?;
        if entries > budget {
            return Err(Error::BudgetExceeded(format!(
                "|K|^{k} = {entries} exceeds the budget of {budget} table entries"
            )));
        }
    }
    let unary_slice = closure_slice(domain, codomain, generators, 1)?;
    let unary_gens = unary_slice.basis_functions();
    let mut verdicts = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let full = closure_slice(domain, codomain, generators, k)?;
        let from_unary = closure_slice(domain, codomain, &unary_gens, k)?;
        verdicts.push(UnaryVerdict {
            k,
            rank_c: full.ranks(),
            rank_unary: from_unary.ranks(),
            equal: full == from_unary,
        });
    }
    let all_equal = verdicts.iter().all(|v| v.equal);
    Ok(UnaryCheckReport {
        verdicts,
        all_equal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{dep_set, f_int_scale};

    fn gf(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    fn ring(p: u64) -> ProductRingSpec {
        ProductRingSpec::single(gf(p))
    }

    fn pair(p: u64, q: u64) -> ProductRingSpec {
        ProductRingSpec::new(vec![gf(p), gf(q)]).unwrap()
    }

    fn unary(k: &ProductRingSpec, f: &ProductRingSpec, values: &[u64]) -> FiniteFunction {
        FiniteFunction::from_table_values(
            k.clone(),
            f.clone(),
            1,
            values.iter().map(|&v| vec![v]).collect(),
        )
        .unwrap()
    }

    #[test]
    fn closure_of_constants_is_rank_one() {
        let k = ring(3);
        let f = ring(2);
        let one = FiniteFunction::constant(k.clone(), f.clone(), 1, f.one()).unwrap();
        let slice = closure_slice(&k, &f, &[one.clone()], 1).unwrap();
        assert_eq!(slice.ranks(), vec![1]);
        assert_eq!(slice.parts()[0].rows(), &[vec![1, 1, 1]]);
        assert!(member(&one, &slice).unwrap());
        let zero = FiniteFunction::zero(k.clone(), f.clone(), 1).unwrap();
        assert!(member(&zero, &slice).unwrap());
        let delta = unary(&k, &f, &[1, 0, 0]);
        assert!(!member(&delta, &slice).unwrap());
    }

    #[test]
    fn closure_of_nothing_is_bottom() {
        let k = ring(3);
        let f = ring(2);
        let slice = closure_slice(&k, &f, &[], 1).unwrap();
        assert_eq!(slice.ranks(), vec![0]);
        let one = FiniteFunction::constant(k.clone(), f.clone(), 1, f.one()).unwrap();
        assert!(!member(&one, &slice).unwrap());
    }

    #[test]
    fn closure_of_everything_is_full() {
        let k = ring(3);
        let f = ring(2);
        let gens: Vec<FiniteFunction> = (0..8u32)
            .map(|bits| unary(&k, &f, &[(bits & 1) as u64, (bits >> 1 & 1) as u64, (bits >> 2 & 1) as u64]))
            .collect();
        let slice = closure_slice(&k, &f, &gens, 1).unwrap();
        assert_eq!(slice.ranks(), vec![3]);
    }

    #[test]
    fn closure_requires_coprime_orders() {
        let k = ring(2);
        let f = ring(2);
        assert!(matches!(
            closure_slice(&k, &f, &[], 1),
            Err(Error::NotCoprime { .. })
        ));
    }

    #[test]
    fn closure_is_idempotent_and_monotone() {
        let k = ring(3);
        let f = ring(2);
        let g1 = unary(&k, &f, &[0, 1, 0]);
        let g2 = unary(&k, &f, &[1, 1, 1]);
        for arity in [1, 2] {
            let small = closure_slice(&k, &f, &[g1.clone()], arity).unwrap();
            let again = closure_slice(&k, &f, &small.basis_functions(), arity).unwrap();
            assert_eq!(again, small);
            let large = closure_slice(&k, &f, &[g1.clone(), g2.clone()], arity).unwrap();
            assert!(small.parts()[0].is_subspace_of(&large.parts()[0]));
        }
    }

    #[test]
    fn slices_are_closed_under_substitution() {
        let k = pair(2, 3);
        let f = ring(5);
        let g = unary(&k, &f, &[0, 1, 2, 0, 3, 4]);
        for arity in [1, 2] {
            let slice = closure_slice(&k, &f, &[g.clone()], arity).unwrap();
            for b in slice.basis_functions() {
                for_each_matrix_tuple(&k, arity, arity, |mats| {
                    let image = substitute(&b, mats)?;
                    assert!(member(&image, &slice)?);
                    Ok(())
                })
                .unwrap();
            }
        }
    }

    #[test]
    fn line_counts_match_the_projective_formula() {
        assert_eq!(lines_enumerate(&ring(3), 2).unwrap().len(), 4);
        assert_eq!(lines_enumerate(&ring(3), 1).unwrap().len(), 1);
        assert_eq!(lines_enumerate(&pair(2, 3), 1).unwrap().len(), 1);
        assert_eq!(lines_enumerate(&pair(2, 3), 2).unwrap().len(), 12);
        // Representatives are pairwise distinct.
        let lines = lines_enumerate(&pair(2, 3), 2).unwrap();
        let set: BTreeSet<Vec<Vec<u64>>> =
            lines.iter().map(|l| l.generators().to_vec()).collect();
        assert_eq!(set.len(), 12);
    }

    #[test]
    fn line_component_of_zero_is_zero() {
        let k = ring(3);
        let f = ring(2);
        let zero = FiniteFunction::zero(k.clone(), f, 2).unwrap();
        for line in lines_enumerate(&k, 2).unwrap() {
            assert!(line_component(&zero, &line).unwrap().is_zero());
        }
    }

    #[test]
    fn absorbing_functions_split_along_lines() {
        let k = ring(3);
        let f = ring(2);
        // 0-absorbing in the single block: vanishes at the origin.
        let func = FiniteFunction::from_fn(k.clone(), f.clone(), 2, |point| {
            if point.iter().all(|x| x.is_zero()) {
                f.zero()
            } else {
                let v = (point[0].coord(0).value() + 2 * point[1].coord(0).value()) % 2;
                f.element_from_values(&[v]).unwrap()
            }
        })
        .unwrap();
        assert!(is_absorbing(&func, &BTreeSet::from([0])));
        let mut sum = FiniteFunction::zero(k.clone(), f.clone(), 2).unwrap();
        for line in lines_enumerate(&k, 2).unwrap() {
            sum = f_plus(&sum, &line_component(&func, &line).unwrap()).unwrap();
        }
        assert_eq!(sum, func);
    }

    #[test]
    fn transport_from_standard_lines_is_identity() {
        let k = ring(3);
        let f = ring(2);
        let g = build_t_k(&unary(&k, &f, &[0, 1, 1]), 2).unwrap();
        let line = LineProduct::standard(k.clone(), 2);
        let mats = line_transport(&g, &line, &g).unwrap();
        assert_eq!(mats[0], Matrix::identity(gf(3), 2));
    }

    #[test]
    fn transport_swaps_coordinates() {
        let k = ring(3);
        let f = ring(2);
        let g = build_t_k(&unary(&k, &f, &[0, 1, 1]), 2).unwrap();
        let line = LineProduct::new(k.clone(), 2, vec![vec![0, 1]]).unwrap();
        // f lives on the swapped line with the same scalar values.
        let func = FiniteFunction::from_fn(k.clone(), f.clone(), 2, |point| {
            g.eval(&[point[1].clone(), point[0].clone()]).unwrap()
        })
        .unwrap();
        let mats = line_transport(&func, &line, &g).unwrap();
        assert_eq!(substitute(&g, &mats).unwrap(), func);

        let bad = FiniteFunction::from_fn(k.clone(), f.clone(), 2, |point| {
            let v = func.eval(point).unwrap();
            if point.iter().all(|x| x.is_zero()) {
                v
            } else if point[0].is_zero() && point[1].coord(0).value() == 1 {
                f.element_from_values(&[1 - v.coord(0).value()]).unwrap()
            } else {
                v
            }
        })
        .unwrap();
        assert!(matches!(
            line_transport(&bad, &line, &g),
            Err(Error::ValueMismatch)
        ));
    }

    #[test]
    fn t_1_is_the_function_itself() {
        let k = ring(3);
        let f = ring(2);
        let g = unary(&k, &f, &[0, 1, 1]);
        assert_eq!(build_t_k(&g, 1).unwrap(), g);
        let zero = FiniteFunction::zero(k, f, 1).unwrap();
        assert!(build_t_k(&zero, 3).unwrap().is_zero());
    }

    #[test]
    fn t_2_is_supported_on_the_diagonal_line() {
        let k = ring(3);
        let f = ring(2);
        let g = unary(&k, &f, &[0, 1, 1]);
        let t2 = build_t_k(&g, 2).unwrap();
        // Nonzero exactly at (lambda, 0) for lambda != 0.
        assert_eq!(t2.component_vector(0), vec![0, 0, 0, 1, 0, 0, 1, 0, 0]);
        let all = BTreeSet::from([0]);
        assert!(is_absorbing(&t2, &all));
        assert!(matches!(
            build_t_k(&unary(&k, &f, &[1, 0, 0]), 2),
            Err(Error::NotAbsorbing)
        ));
    }

    #[test]
    fn r_k_scales_t_k_by_the_domain_order() {
        // K = F_2, F = F_3: the factor 2 is not 1 mod 3, so the scaling is
        // visible. Exhaustive over the three 0-absorbing unary functions.
        let k = ring(2);
        let f = ring(3);
        for v in 0..3u64 {
            let g = unary(&k, &f, &[0, v]);
            for arity in [2, 3] {
                let t = build_t_k(&g, arity).unwrap();
                let r = build_r_k(&g, arity).unwrap();
                assert_eq!(r, f_int_scale(2, &t).unwrap());
            }
        }
        assert!(matches!(
            build_r_k(&unary(&k, &f, &[0, 1]), 1),
            Err(Error::BadArity(_))
        ));
    }

    #[test]
    fn unary_check_accepts_small_instances() {
        let k = ring(3);
        let f = ring(2);
        let g = FiniteFunction::from_table_values(
            k.clone(),
            f.clone(),
            2,
            vec![
                vec![1], vec![0], vec![1],
                vec![0], vec![1], vec![1],
                vec![0], vec![0], vec![1],
            ],
        )
        .unwrap();
        let report = unary_generation_check(&k, &f, &[g], 2, 100_000).unwrap();
        assert!(report.all_equal);
        assert_eq!(report.verdicts.len(), 2);

        let empty = unary_generation_check(&k, &f, &[], 2, 100_000).unwrap();
        assert!(empty.all_equal);
        assert!(empty.verdicts.iter().all(|v| v.rank_c.iter().all(|&r| r == 0)));

        assert!(matches!(
            unary_generation_check(&ring(2), &ring(2), &[], 1, 100_000),
            Err(Error::NotCoprime { .. })
        ));
        assert!(matches!(
            unary_generation_check(&k, &f, &[], 8, 100),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn substitution_never_adds_dependencies() {
        let k = pair(2, 3);
        let f = ring(5);
        let g = FiniteFunction::from_fn(k.clone(), f.clone(), 1, |point| {
            f.element_from_values(&[point[0].coord(1).value()]).unwrap()
        })
        .unwrap();
        let deps = dep_set(&g);
        for_each_matrix_tuple(&k, 1, 2, |mats| {
            let image = substitute(&g, mats)?;
            assert!(dep_set(&image).is_subset(&deps));
            Ok(())
        })
        .unwrap();
    }
}
