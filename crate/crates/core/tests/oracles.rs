//! Independent cross-checks of derived values.

use koszul_lab::field::Field;
use koszul_lab::graded::Representation;
use koszul_lab::koszul::{koszul_differential, FullCohomology};
use koszul_lab::linalg::{Mat, Subspace};
use koszul_lab::models::{gen_canonical, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_three_dimensional_subspaces_carry_no_syzygies() {
    let f = Field::prime(101).unwrap();
    let model = gen_canonical(6, Variant::Grass, &f, 1).unwrap();
    let ring = model.ring(Representation::Presentation).unwrap();
    let full = FullCohomology::new(&ring, 2, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut histogram = [0usize; 6];
    for _ in 0..50 {
        let rows = (0..3)
            .map(|_| (0..6).map(|_| f.random(&mut rng)).collect())
            .collect();
        let w = Subspace::from_rows(&f, 6, rows).unwrap();
        histogram[full.image_of(&ring, &w).unwrap().dim()] += 1;
    }
    assert_eq!(histogram, [50, 0, 0, 0, 0, 0]);
}

#[test]
fn quadrics_of_genus_four_model() {
    // Sym^2 V -> M_2 has a one-dimensional kernel
    let f = Field::prime(101).unwrap();
    let model = gen_canonical(4, Variant::Ci, &f, 5).unwrap();
    let ring = model.ring(Representation::Presentation).unwrap();
    let mults = ring.mult_maps(1).unwrap();
    let mut images = Vec::new();
    for (i, mult) in mults.iter().enumerate() {
        for j in i..4 {
            images.push(mult.column(j));
        }
    }
    let m = Mat::from_rows(&f, ring.dim(2).unwrap(), &images).unwrap();
    assert_eq!(images.len() - m.rank(), 1);
}

#[test]
fn large_differential_rank_nullity() {
    let f = Field::prime(101).unwrap();
    let model = gen_canonical(8, Variant::Grass, &f, 1).unwrap();
    let ring = model.ring(Representation::Presentation).unwrap();
    let v = Subspace::full(&f, 8);
    let d = koszul_differential(&ring, &v, 3, 1).unwrap();
    let rank = d.rank();
    assert_eq!(rank + d.kernel_basis().dim(), d.ncols());
    assert_eq!(rank, d.transpose().rank());
    assert_eq!(d.transpose().kernel_basis().dim(), d.nrows() - rank);
}
