//! Dense-table finitary functions f: K^n -> F: the point-index encoding,
//! evaluation, the left F-module structure, right composition with blockwise
//! linear maps, restriction, dependency sets and the block-zeroing operator.

use crate::error::{Error, Result};
use crate::ffield::{FieldElement, ProductRingSpec, RingElement};
use crate::linalg::Matrix;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Index of a point of K^n in the canonical enumeration: argument 1 is the
/// most significant position, and each argument uses the canonical element
/// code of K. Bit-exact and fixed forever.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointIndex(pub usize);

/// Number of points of K^n.
pub fn point_count(domain: &ProductRingSpec, arity: usize) -> Result<usize> {
    let n = u32::try_from(arity).map_err(|_| Error::BadArity(format!("arity {arity} too large")))?;
    domain
        .order()
        .checked_pow(n)
        .filter(|&c| c <= 1 << 32)
        .and_then(|c| usize::try_from(c).ok())
        .ok_or_else(|| Error::BadRange(format!("table with {}^{} entries too large", domain.order(), arity)))
}

pub fn encode_point(domain: &ProductRingSpec, point: &[RingElement]) -> Result<PointIndex> {
    let mut idx = 0usize;
    for x in point {
        domain.check_member(x)?;
        idx = idx * domain.order() as usize + domain.index_of(x);
    }
    Ok(PointIndex(idx))
}

pub fn decode_point(domain: &ProductRingSpec, arity: usize, index: PointIndex) -> Vec<RingElement> {
    let order = domain.order() as usize;
    let mut point = vec![domain.zero(); arity];
    let mut idx = index.0;
    for x in point.iter_mut().rev() {
        *x = domain.element_of_index(idx % order);
        idx /= order;
    }
    debug_assert_eq!(idx, 0, "point index out of range");
    point
}

#[derive(Serialize, Deserialize)]
struct FiniteFunctionRepr {
    domain: ProductRingSpec,
    codomain: ProductRingSpec,
    arity: usize,
    table: Vec<Vec<u64>>,
}

/// A function K^n -> F stored as a dense table in point-index order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FiniteFunctionRepr", into = "FiniteFunctionRepr")]
pub struct FiniteFunction {
    domain: ProductRingSpec,
    codomain: ProductRingSpec,
    arity: usize,
    table: Vec<RingElement>,
}

impl From<FiniteFunction> for FiniteFunctionRepr {
    fn from(f: FiniteFunction) -> Self {
        FiniteFunctionRepr {
            domain: f.domain,
            codomain: f.codomain,
            arity: f.arity,
            table: f
                .table
                .into_iter()
                .map(|e| e.coords().iter().map(|c| c.value()).collect())
                .collect(),
        }
    }
}

impl TryFrom<FiniteFunctionRepr> for FiniteFunction {
    type Error = Error;

    fn try_from(repr: FiniteFunctionRepr) -> Result<Self> {
        let table = repr
            .table
            .iter()
            .map(|row| repr.codomain.element_from_values(row))
            .collect::<Result<Vec<_>>>()?;
        FiniteFunction::new(repr.domain, repr.codomain, repr.arity, table)
    }
}

impl FiniteFunction {
    pub fn new(
        domain: ProductRingSpec,
        codomain: ProductRingSpec,
        arity: usize,
        table: Vec<RingElement>,
    ) -> Result<Self> {
        if arity == 0 {
            return Err(Error::BadArity("arity must be at least 1".into()));
        }
        let expected = point_count(&domain, arity)?;
        if table.len() != expected {
            return Err(Error::WrongLength {
                expected,
                got: table.len(),
            });
        }
        for e in &table {
            codomain.check_member(e)?;
        }
        Ok(FiniteFunction {
            domain,
            codomain,
            arity,
            table,
        })
    }

    pub fn from_fn(
        domain: ProductRingSpec,
        codomain: ProductRingSpec,
        arity: usize,
        f: impl Fn(&[RingElement]) -> RingElement,
    ) -> Result<Self> {
        let count = point_count(&domain, arity)?;
        let table = (0..count)
            .map(|i| f(&decode_point(&domain, arity, PointIndex(i))))
            .collect();
        Self::new(domain, codomain, arity, table)
    }

    pub fn from_table_values(
        domain: ProductRingSpec,
        codomain: ProductRingSpec,
        arity: usize,
        values: Vec<Vec<u64>>,
    ) -> Result<Self> {
        let table = values
            .iter()
            .map(|row| codomain.element_from_values(row))
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain, codomain, arity, table)
    }

    pub fn constant(
        domain: ProductRingSpec,
        codomain: ProductRingSpec,
        arity: usize,
        value: RingElement,
    ) -> Result<Self> {
        codomain.check_member(&value)?;
        let count = point_count(&domain, arity)?;
        Self::new(domain, codomain, arity, vec![value; count])
    }

    pub fn zero(domain: ProductRingSpec, codomain: ProductRingSpec, arity: usize) -> Result<Self> {
        let z = codomain.zero();
        Self::constant(domain, codomain, arity, z)
    }

    /// The function whose component `comp` has the given values in table
    /// order and whose other components are zero.
    pub fn from_single_component(
        domain: ProductRingSpec,
        codomain: ProductRingSpec,
        arity: usize,
        comp: usize,
        values: &[u64],
    ) -> Result<Self> {
        let s = codomain.num_factors();
        if comp >= s {
            return Err(Error::BadRange(format!("component {comp} out of 0..{s}")));
        }
        let table = values
            .iter()
            .map(|&v| {
                let mut coords = vec![0u64; s];
                coords[comp] = v;
                codomain.element_from_values(&coords)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain, codomain, arity, table)
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

    pub fn table(&self) -> &[RingElement] {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.table.iter().all(|e| e.is_zero())
    }

    pub fn eval(&self, point: &[RingElement]) -> Result<RingElement> {
        if point.len() != self.arity {
            return Err(Error::WrongLength {
                expected: self.arity,
                got: point.len(),
            });
        }
        let idx = encode_point(&self.domain, point)?;
        Ok(self.table[idx.0].clone())
    }

    pub fn value_at(&self, index: PointIndex) -> &RingElement {
        &self.table[index.0]
    }

    /// The values of component `comp` in table order, as a coordinate vector
    /// over the factor field.
    pub fn component_vector(&self, comp: usize) -> Vec<u64> {
        self.table.iter().map(|e| e.coord(comp).value()).collect()
    }

    pub fn same_shape_as(&self, other: &FiniteFunction) -> bool {
        self.domain == other.domain && self.codomain == other.codomain && self.arity == other.arity
    }
}

fn check_same_shape(f: &FiniteFunction, g: &FiniteFunction) -> Result<()> {
    if !f.same_shape_as(g) {
        return Err(Error::ShapeMismatch(
            "functions have different domain, codomain or arity".into(),
        ));
    }
    Ok(())
}

/// Left scaling: pointwise Hadamard product with a fixed F-element.
pub fn f_scale(a: &RingElement, f: &FiniteFunction) -> Result<FiniteFunction> {
    f.codomain.check_member(a)?;
    let table = f
        .table
        .iter()
        .map(|e| f.codomain.mul(a, e))
        .collect::<Result<Vec<_>>>()?;
    FiniteFunction::new(f.domain.clone(), f.codomain.clone(), f.arity, table)
}

/// Pointwise sum in F.
pub fn f_plus(f: &FiniteFunction, g: &FiniteFunction) -> Result<FiniteFunction> {
    check_same_shape(f, g)?;
    let table = f
        .table
        .iter()
        .zip(&g.table)
        .map(|(a, b)| f.codomain.add(a, b))
        .collect::<Result<Vec<_>>>()?;
    FiniteFunction::new(f.domain.clone(), f.codomain.clone(), f.arity, table)
}

/// Pointwise difference in F.
pub fn f_minus(f: &FiniteFunction, g: &FiniteFunction) -> Result<FiniteFunction> {
    check_same_shape(f, g)?;
    let table = f
        .table
        .iter()
        .zip(&g.table)
        .map(|(a, b)| f.codomain.add(a, &f.codomain.neg(b)?))
        .collect::<Result<Vec<_>>>()?;
    FiniteFunction::new(f.domain.clone(), f.codomain.clone(), f.arity, table)
}

/// Pointwise integer multiple: `f` added to itself `c mod p_i` times in each
/// component.
pub fn f_int_scale(c: u64, f: &FiniteFunction) -> Result<FiniteFunction> {
    let coords = f
        .codomain
        .factors()
        .iter()
        .map(|field| c % field.p() % field.q())
        .collect::<Vec<_>>();
    let scalar = f.codomain.element_from_values(&coords)?;
    f_scale(&scalar, f)
}

/// Right composition with blockwise linear maps: given matrices A_j of shape
/// n x l over the j-th factor field, returns the l-ary function
/// (x_1,...,x_m) -> f(A_1 x_1, ..., A_m x_m), where x_j collects the j-th
/// coordinates of the l arguments.
pub fn substitute(f: &FiniteFunction, mats: &[Matrix]) -> Result<FiniteFunction> {
    let m = f.domain.num_factors();
    if mats.len() != m {
        return Err(Error::ShapeMismatch(format!(
            "expected {m} matrices, got {}",
            mats.len()
        )));
    }
    let mut new_arity = None;
    for (j, mat) in mats.iter().enumerate() {
        if mat.field() != &f.domain.factors()[j] {
            return Err(Error::ShapeMismatch(format!(
                "matrix {j} is over the wrong field"
            )));
        }
        let (rows, cols) = mat.shape();
        if rows != f.arity {
            return Err(Error::ShapeMismatch(format!(
                "matrix {j} has {rows} rows, expected {}",
                f.arity
            )));
        }
        match new_arity {
            None => new_arity = Some(cols),
            Some(l) if l == cols => {}
            Some(l) => {
                return Err(Error::ShapeMismatch(format!(
                    "matrix {j} has {cols} columns, expected {l}"
                )))
            }
        }
    }
    let l = new_arity.unwrap();
    if l == 0 {
        return Err(Error::BadArity("substitution target arity must be at least 1".into()));
    }
    let count = point_count(&f.domain, l)?;
    let n = f.arity;
    let mut table = Vec::with_capacity(count);
    let mut args = vec![f.domain.zero(); n];
    for idx in 0..count {
        let point = decode_point(&f.domain, l, PointIndex(idx));
        for j in 0..m {
            let column: Vec<u64> = point.iter().map(|x| x.coord(j).value()).collect();
            let image = mats[j].mul_vec(&column);
            for (i, v) in image.into_iter().enumerate() {
                let mut coords: Vec<FieldElement> = args[i].coords().to_vec();
                coords[j] = f.domain.factors()[j].element(v)?;
                args[i] = f.domain.element(coords)?;
            }
        }
        let at = encode_point(&f.domain, &args)?;
        table.push(f.table[at.0].clone());
    }
    FiniteFunction::new(f.domain.clone(), f.codomain.clone(), l, table)
}

/// x^(J): keeps the K_i-coordinates for i in `keep` and zeroes the rest, in
/// every argument.
pub fn zero_mask(
    domain: &ProductRingSpec,
    point: &[RingElement],
    keep: &BTreeSet<usize>,
) -> Result<Vec<RingElement>> {
    let m = domain.num_factors();
    if let Some(&i) = keep.iter().find(|&&i| i >= m) {
        return Err(Error::BadRange(format!("factor index {i} out of 0..{m}")));
    }
    point
        .iter()
        .map(|x| {
            domain.check_member(x)?;
            let coords = x
                .coords()
                .iter()
                .enumerate()
                .map(|(i, &c)| if keep.contains(&i) { c } else { FieldElement::default() })
                .collect();
            domain.element(coords)
        })
        .collect()
}

/// Same masking on a raw point index; `keep_mask` bit i keeps factor i.
pub(crate) fn zero_mask_index(
    domain: &ProductRingSpec,
    arity: usize,
    index: usize,
    keep_mask: u32,
) -> usize {
    let point = decode_point(domain, arity, PointIndex(index));
    let mut idx = 0usize;
    for x in &point {
        let coords = x
            .coords()
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if keep_mask >> i & 1 == 1 {
                    c
                } else {
                    FieldElement::default()
                }
            })
            .collect();
        let masked = domain.element(coords).expect("masking preserves validity");
        idx = idx * domain.order() as usize + domain.index_of(&masked);
    }
    idx
}

/// The set of factor indices (0-based) whose argument block f depends on.
pub fn dep_set(f: &FiniteFunction) -> BTreeSet<usize> {
    let m = f.domain.num_factors();
    let mut deps = BTreeSet::new();
    for i in 0..m {
        let drop_mask = !(1u32 << i);
        let mut seen: Vec<Option<&RingElement>> = vec![None; f.table.len()];
        'scan: for (idx, value) in f.table.iter().enumerate() {
            let key = zero_mask_index(&f.domain, f.arity, idx, drop_mask);
            match seen[key] {
                None => seen[key] = Some(value),
                Some(prev) => {
                    if prev != value {
                        deps.insert(i);
                        break 'scan;
                    }
                }
            }
        }
    }
    deps
}

/// Restriction to the first `h` factor blocks: trailing blocks evaluate at 0.
pub fn restrict(f: &FiniteFunction, h: usize) -> Result<FiniteFunction> {
    let m = f.domain.num_factors();
    if h == 0 || h > m {
        return Err(Error::BadFactorCount { got: h, max: m });
    }
    let sub = ProductRingSpec::new(f.domain.factors()[..h].to_vec())?;
    let full = f.domain.clone();
    FiniteFunction::from_fn(sub, f.codomain.clone(), f.arity, |point| {
        let embedded: Vec<RingElement> = point
            .iter()
            .map(|x| {
                let mut coords: Vec<FieldElement> = x.coords().to_vec();
                coords.resize(m, FieldElement::default());
                full.element(coords).expect("embedding preserves validity")
            })
            .collect();
        f.eval(&embedded).expect("embedded point is valid")
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffield::FieldSpec;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn f3() -> FieldSpec {
        FieldSpec::prime(3).unwrap()
    }

    fn k_f3() -> ProductRingSpec {
        ProductRingSpec::single(f3())
    }

    fn k_f2xf3() -> ProductRingSpec {
        ProductRingSpec::new(vec![f2(), f3()]).unwrap()
    }

    fn cod_f2() -> ProductRingSpec {
        ProductRingSpec::single(f2())
    }

    /// Indicator of the zero point.
    fn delta_zero(domain: ProductRingSpec, codomain: ProductRingSpec, arity: usize) -> FiniteFunction {
        let one = codomain.one();
        let zero = codomain.zero();
        FiniteFunction::from_fn(domain, codomain.clone(), arity, |point| {
            if point.iter().all(|x| x.is_zero()) {
                one.clone()
            } else {
                zero.clone()
            }
        })
        .unwrap()
    }

    #[test]
    fn point_encoding_examples() {
        let k = k_f3();
        let p = vec![
            k.element_from_values(&[1]).unwrap(),
            k.element_from_values(&[2]).unwrap(),
        ];
        assert_eq!(encode_point(&k, &p).unwrap(), PointIndex(5));

        let k = k_f2xf3();
        let p = vec![k.element_from_values(&[1, 2]).unwrap()];
        assert_eq!(encode_point(&k, &p).unwrap(), PointIndex(5));
    }

    #[test]
    fn point_encoding_is_a_bijection() {
        for (k, n) in [(k_f3(), 2), (k_f2xf3(), 2)] {
            let count = point_count(&k, n).unwrap();
            for i in 0..count {
                let p = decode_point(&k, n, PointIndex(i));
                assert_eq!(encode_point(&k, &p).unwrap(), PointIndex(i));
            }
        }
    }

    #[test]
    fn eval_examples() {
        let d = delta_zero(k_f3(), cod_f2(), 1);
        let zero = vec![k_f3().zero()];
        let two = vec![k_f3().element_from_values(&[2]).unwrap()];
        assert_eq!(d.eval(&zero).unwrap(), cod_f2().one());
        assert_eq!(d.eval(&two).unwrap(), cod_f2().zero());
        let z = FiniteFunction::zero(k_f3(), cod_f2(), 1).unwrap();
        assert!(z.eval(&two).unwrap().is_zero());
    }

    #[test]
    fn scaling_examples() {
        let f = delta_zero(k_f3(), cod_f2(), 1);
        assert_eq!(f_scale(&cod_f2().one(), &f).unwrap(), f);
        assert!(f_scale(&cod_f2().zero(), &f).unwrap().is_zero());

        // Scaling by (1, 0) zeroes the second component everywhere.
        let cod = ProductRingSpec::new(vec![f2(), f3()]).unwrap();
        let g = FiniteFunction::from_table_values(
            k_f3(),
            cod.clone(),
            1,
            vec![vec![1, 2], vec![0, 1], vec![1, 0]],
        )
        .unwrap();
        let a = cod.element_from_values(&[1, 0]).unwrap();
        let scaled = f_scale(&a, &g).unwrap();
        for e in scaled.table() {
            assert_eq!(e.coord(1).value(), 0);
        }
        assert_eq!(scaled.component_vector(0), g.component_vector(0));
    }

    #[test]
    fn substitute_identity_and_zero() {
        let k = k_f2xf3();
        let f = delta_zero(k.clone(), cod_f2(), 2);
        let idents: Vec<Matrix> = k
            .factors()
            .iter()
            .map(|fs| Matrix::identity(fs.clone(), 2))
            .collect();
        assert_eq!(substitute(&f, &idents).unwrap(), f);

        let zeros: Vec<Matrix> = k
            .factors()
            .iter()
            .map(|fs| Matrix::zeros(fs.clone(), 2, 2))
            .collect();
        let sub = substitute(&f, &zeros).unwrap();
        let at_zero = f.table()[0].clone();
        assert!(sub.table().iter().all(|e| *e == at_zero));
    }

    #[test]
    fn substitute_matches_direct_evaluation() {
        // n = 1, l = 2, A = [1 1]: g(x, y) = f(x + y), checked at all 9 points.
        let k = k_f3();
        let f = FiniteFunction::from_table_values(k.clone(), cod_f2(), 1, vec![vec![1], vec![0], vec![1]])
            .unwrap();
        let a = Matrix::new(f3(), 1, 2, vec![1, 1]).unwrap();
        let g = substitute(&f, &[a]).unwrap();
        assert_eq!(g.arity(), 2);
        for x in k.elements() {
            for y in k.elements() {
                let sum = k.add(&x, &y).unwrap();
                assert_eq!(
                    g.eval(&[x.clone(), y.clone()]).unwrap(),
                    f.eval(&[sum]).unwrap()
                );
            }
        }
    }

    #[test]
    fn dependency_sets() {
        let constant = FiniteFunction::constant(k_f2xf3(), cod_f2(), 2, cod_f2().one()).unwrap();
        assert!(dep_set(&constant).is_empty());

        // f(x, y) = indicator that the first coordinate block of x is 0.
        let k = k_f2xf3();
        let f = FiniteFunction::from_fn(k.clone(), cod_f2(), 2, |point| {
            if point[0].coord(0).is_zero() {
                cod_f2().one()
            } else {
                cod_f2().zero()
            }
        })
        .unwrap();
        assert_eq!(dep_set(&f), BTreeSet::from([0]));

        let d = delta_zero(k_f3(), cod_f2(), 1);
        assert_eq!(dep_set(&d), BTreeSet::from([0]));
    }

    #[test]
    fn zero_mask_examples() {
        let k = k_f2xf3();
        let x = vec![k.element_from_values(&[1, 2]).unwrap()];
        let all = BTreeSet::from([0, 1]);
        assert_eq!(zero_mask(&k, &x, &all).unwrap(), x);
        let none = BTreeSet::new();
        assert!(zero_mask(&k, &x, &none).unwrap()[0].is_zero());
        let second = BTreeSet::from([1]);
        assert_eq!(
            zero_mask(&k, &x, &second).unwrap()[0],
            k.element_from_values(&[0, 2]).unwrap()
        );
    }

    #[test]
    fn restriction_examples() {
        let k = k_f2xf3();
        let f = delta_zero(k.clone(), cod_f2(), 2);
        let same = restrict(&f, 2).unwrap();
        assert_eq!(same, f);

        // Projection onto the second block, embedded in F_3: restricting to
        // the first factor evaluates the tail at 0, giving the constant 0.
        let cod = ProductRingSpec::single(f3());
        let proj = FiniteFunction::from_fn(k.clone(), cod.clone(), 1, |point| {
            cod.element(vec![point[0].coord(1)]).unwrap()
        })
        .unwrap();
        let restricted = restrict(&proj, 1).unwrap();
        assert!(restricted.is_zero());
        assert_eq!(restricted.domain().num_factors(), 1);

        assert!(matches!(restrict(&f, 0), Err(Error::BadFactorCount { .. })));
        assert!(matches!(restrict(&f, 3), Err(Error::BadFactorCount { .. })));
    }

    #[test]
    fn function_json_roundtrip() {
        let f = delta_zero(k_f2xf3(), cod_f2(), 1);
        let json = serde_json::to_string(&f).unwrap();
        let back: FiniteFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
        // Wrong table length is rejected.
        let bad = json.replace("[1],[0]", "[1]");
        assert!(serde_json::from_str::<FiniteFunction>(&bad).is_err());
    }
}
