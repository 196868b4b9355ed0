use koszul_lab::field::{Fel, Field, FieldSpec};
use koszul_lab::graded::{
    substitute_linear, CoordinateRing, Generator, PresentationModel, Representation,
};
use koszul_lab::koszul::{betti_table, KoszulCell};
use koszul_lab::linalg::{Mat, Subspace};
use koszul_lab::models::{gen_canonical, CanonicalModel, Variant};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fields() -> Vec<Field> {
    vec![
        Field::prime(3).unwrap(),
        Field::prime(7).unwrap(),
        Field::prime(101).unwrap(),
        Field::new(FieldSpec::extension(3, 2).unwrap()).unwrap(),
        Field::new(FieldSpec::extension(7, 3).unwrap()).unwrap(),
    ]
}

fn field_strategy() -> impl Strategy<Value = Field> {
    (0..fields().len()).prop_map(|i| fields().swap_remove(i))
}

fn elem(f: &Field, i: u64) -> Fel {
    f.element(i % f.order()).unwrap()
}

/// Random matrix with entries concentrated on zero so that low ranks occur.
fn random_mat(f: &Field, r: usize, c: usize, seed: u64) -> Mat {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sparse = rng.gen_bool(0.5);
    Mat::from_fn(f, r, c, |_, _| {
        if sparse && rng.gen_bool(0.7) {
            Fel::ZERO
        } else {
            f.random(&mut rng)
        }
    })
}

proptest! {
    #[test]
    fn field_axioms(f in field_strategy(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (a, b, c) = (elem(&f, a), elem(&f, b), elem(&f, c));
        prop_assert_eq!(f.add(a, b), f.add(b, a));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
        prop_assert_eq!(f.sub(a, b), f.add(a, f.neg(b)));
        prop_assert_eq!(f.mul(a, f.one()), a);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            prop_assert_eq!(f.pow(a, f.order() - 1), f.one());
        } else {
            prop_assert!(f.inv(a).is_err());
        }
    }

    #[test]
    fn encoding_round_trips(f in field_strategy(), a in any::<u64>()) {
        let a = elem(&f, a);
        prop_assert_eq!(f.decode(&f.encode(a)).unwrap(), a);
    }

    #[test]
    fn rank_of_transpose(f in field_strategy(), r in 0usize..9, c in 0usize..9, seed in any::<u64>()) {
        let m = random_mat(&f, r, c, seed);
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn rank_nullity(f in field_strategy(), r in 0usize..9, c in 0usize..9, seed in any::<u64>()) {
        let m = random_mat(&f, r, c, seed);
        let ker = m.kernel_basis();
        prop_assert_eq!(m.rank() + ker.dim(), c);
        for v in ker.vectors() {
            prop_assert!(m.mul_vec(v).unwrap().iter().all(|x| x.is_zero()));
        }
        prop_assert_eq!(m.column_space().dim(), m.rank());
    }

    #[test]
    fn rank_of_product_is_bounded(f in field_strategy(), seed in any::<u64>()) {
        let a = random_mat(&f, 5, 6, seed);
        let b = random_mat(&f, 6, 4, seed ^ 1);
        let ab = a.mul(&b).unwrap();
        prop_assert!(ab.rank() <= a.rank().min(b.rank()));
    }

    #[test]
    fn subspace_lattice(f in field_strategy(), n in 1usize..8, ru in 0usize..8, rw in 0usize..8, seed in any::<u64>()) {
        let u = random_mat(&f, ru, n, seed).row_space();
        let w = random_mat(&f, rw, n, seed.wrapping_add(1)).row_space();
        let sum = u.sum(&w).unwrap();
        let cap = u.intersect(&w).unwrap();
        prop_assert_eq!(sum.dim() + cap.dim(), u.dim() + w.dim());
        prop_assert!(sum.contains(&u).unwrap() && sum.contains(&w).unwrap());
        prop_assert!(u.contains(&cap).unwrap() && w.contains(&cap).unwrap());
        prop_assert_eq!(u.intersect(&u).unwrap(), u.clone());
        prop_assert_eq!(u.sum(&Subspace::zero(&f, n)).unwrap(), u);
    }
}

fn genus4(f: &Field, seed: u64) -> CanonicalModel {
    gen_canonical(4, Variant::Ci, f, seed).unwrap()
}

/// The same ideal after the coordinate change `x = y P`.
fn change_coordinates(model: &PresentationModel, p: &Mat) -> PresentationModel {
    let gens = model
        .generators
        .iter()
        .map(|g| Generator {
            degree: g.degree,
            coeffs: substitute_linear(&model.field, &g.coeffs, g.degree, p),
        })
        .collect();
    let mut changed = PresentationModel::new(&model.field, model.n, gens).unwrap();
    changed.expected_hilbert = model.expected_hilbert.clone();
    changed
}

fn random_invertible(f: &Field, n: usize, rng: &mut ChaCha8Rng) -> Mat {
    loop {
        let m = Mat::from_fn(f, n, n, |_, _| f.random(rng));
        if m.rank() == n {
            return m;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn differentials_compose_to_zero(
        seed in any::<u64>(),
        wdim in 1usize..=4,
        p in 0i64..=4,
        q in 0i64..=3,
    ) {
        let f = Field::prime(101).unwrap();
        let model = genus4(&f, seed % 8);
        let ring = model.ring(Representation::Presentation).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..wdim).map(|_| (0..4).map(|_| f.random(&mut rng)).collect()).collect();
        let w = Subspace::from_rows(&f, 4, rows).unwrap();
        let cell = KoszulCell::build(&ring, &w, p, q).unwrap();
        if cell.delta_out.nrows() > 0 && cell.delta_in.ncols() > 0 {
            prop_assert!(cell.delta_out.mul(&cell.delta_in).unwrap().is_zero());
        }
    }

    #[test]
    fn betti_numbers_are_coordinate_independent(seed in any::<u64>()) {
        let f = Field::prime(101).unwrap();
        let model = genus4(&f, 1);
        let before = {
            let ring = model.ring(Representation::Presentation).unwrap();
            betti_table(&ring, (0, 3), (0, 2)).unwrap().grid
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let changed = change_coordinates(&model.presentation, &random_invertible(&f, 4, &mut rng));
        let ring = CoordinateRing::presentation(&changed);
        prop_assert_eq!(betti_table(&ring, (0, 3), (0, 2)).unwrap().grid, before);
    }
}

#[test]
fn duality_at_genus_four_and_six() {
    let f = Field::prime(101).unwrap();
    for (g, variant) in [
        (4u32, Variant::Ci),
        (6, Variant::Grass),
        (6, Variant::Sextic),
    ] {
        for seed in 1..=2 {
            let model = gen_canonical(g, variant, &f, seed).unwrap();
            let ring = model.ring(Representation::Presentation).unwrap();
            let gi = g as i64;
            let t = betti_table(&ring, (0, gi - 2), (1, 2)).unwrap();
            for p in 0..=gi - 2 {
                assert_eq!(t.get(p, 1), t.get(gi - 2 - p, 2), "g={g} {variant} p={p}");
            }
        }
    }
}
