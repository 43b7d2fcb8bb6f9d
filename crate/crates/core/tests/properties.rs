use proptest::prelude::*;

use spi_core::autsearch::{initial_coloring, refine};
use spi_core::gf::FieldElem;
use spi_core::groups::Perm;
use spi_core::linalg::{kernel, rank, rref, Matrix, Subspace};
use spi_core::{FieldSpec, SpiGraph, SympSpace};

fn field() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![Just((2, 1)), Just((3, 1)), Just((2, 2)), Just((5, 1)), Just((3, 2))]
        .prop_map(|(p, e)| FieldSpec::new(p, e).unwrap())
}

fn matrix(f: &FieldSpec, rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    let q = f.order() as u16;
    proptest::collection::vec(0..q, rows * cols).prop_map(move |codes| {
        let rs: Vec<Vec<FieldElem>> = codes.chunks(cols).map(|c| c.iter().map(|&x| FieldElem(x)).collect()).collect();
        Matrix::from_rows(cols, &rs).unwrap()
    })
}

fn field_and_matrix() -> impl Strategy<Value = (FieldSpec, Matrix)> {
    (field(), 1..5usize, 1..6usize).prop_flat_map(|(f, r, c)| {
        let m = matrix(&f, r, c);
        (Just(f), m)
    })
}

fn perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(|v| Perm::from_images(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rref_is_idempotent((f, m) in field_and_matrix()) {
        let once = rref(&f, &m);
        let twice = rref(&f, &once.matrix);
        prop_assert_eq!(&once.matrix, &twice.matrix);
        prop_assert_eq!(once.rank, rank(&f, &m));
    }

    #[test]
    fn rank_nullity((f, m) in field_and_matrix()) {
        let k = kernel(&f, &m);
        prop_assert_eq!(rank(&f, &m) + k.dim(), m.cols());
        for v in k.vectors(&f).iter().take(20) {
            let col = Matrix::from_rows(1, &v.iter().map(|&x| [x]).collect::<Vec<_>>()).unwrap();
            prop_assert!(m.mul(&f, &col).unwrap().is_zero());
        }
    }

    #[test]
    fn dimension_of_sum_and_intersection(
        (f, a, b) in field().prop_flat_map(|f| {
            let a = matrix(&f, 3, 4);
            let b = matrix(&f, 3, 4);
            (Just(f), a, b)
        })
    ) {
        let sa = Subspace::from_matrix(&f, &a);
        let sb = Subspace::from_matrix(&f, &b);
        let sum = sa.sum(&f, &sb).unwrap();
        let int = sa.intersect(&f, &sb).unwrap();
        prop_assert_eq!(sum.dim() + int.dim(), sa.dim() + sb.dim());
        prop_assert!(sum.contains_subspace(&f, &sa).unwrap());
        prop_assert!(sa.contains_subspace(&f, &int).unwrap());
    }

    #[test]
    fn dual_dimension_and_type_bounds(
        (f, a, nu) in (field(), 1..3usize).prop_flat_map(|(f, nu)| {
            let a = matrix(&f, 2 * nu, 2 * nu);
            (Just(f), a, Just(nu))
        })
    ) {
        let sp = SympSpace::new(f.clone(), nu).unwrap();
        let s = Subspace::from_matrix(&f, &a);
        let d = sp.dual(&s).unwrap();
        prop_assert_eq!(s.dim() + d.dim(), 2 * nu);
        prop_assert_eq!(sp.dual(&d).unwrap(), s.clone());
        let t = sp.type_of(&s).unwrap();
        prop_assert_eq!(t.m, s.dim());
        prop_assert!(2 * t.s <= t.m && t.m <= nu + t.s);
    }

    #[test]
    fn random_symplectic_is_certified(seed in any::<u64>(), q in prop_oneof![Just((2u32, 1u32)), Just((3, 1)), Just((2, 2))]) {
        use rand::SeedableRng;
        let sp = SympSpace::new(FieldSpec::new(q.0, q.1).unwrap(), 2).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let t = sp.random_symplectic(&mut rng, 6);
        prop_assert!(sp.is_symplectic(t.matrix()).unwrap());
        let inv = sp.inverse(&t);
        prop_assert_eq!(sp.mul(&t, &inv), sp.identity());
    }

    #[test]
    fn perm_composition_is_associative(a in perm(12), b in perm(12), c in perm(12)) {
        prop_assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
        prop_assert!(a.then(&a.inverse()).is_identity());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn refine_is_idempotent_and_monotone(v in 0..65usize, w in 0..65usize) {
        let g = SpiGraph::build(SympSpace::new(FieldSpec::new(2, 1).unwrap(), 2).unwrap()).unwrap();
        let c0 = initial_coloring(&g).individualize(v);
        let c0 = if c0.color(w) == c0.color(v) { c0 } else { c0.individualize(w) };
        let c = refine(&g, &c0);
        prop_assert_eq!(refine(&g, &c), c.clone());
        for cell in c.cells() {
            prop_assert!(cell.iter().all(|&x| c0.color(x) == c0.color(cell[0])));
        }
    }
}
