//! Random general models: canonical curves of genus 4, 6, 8 and a genus-6
//! K3 surface, with their sample points and JSON persistence.

pub mod grassmannian;
pub mod io;
pub mod sampling;
pub mod sextic;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Fel, Field};
use crate::graded::{
    eval_matrix, sym_dim, CoordinateRing, EvaluationModel, Generator, ModelMeta, PresentationModel,
    Representation,
};
use crate::linalg::Subspace;

pub use grassmannian::{plucker_model, restrict_to_linear_section, GrassmannianModel};
pub use io::{load_model, save_model};
pub use sampling::{collect_points, sample_section_points, slice_points, PointFeed};
pub use sextic::{draw_nodal_sextic, NodalSexticModel};

/// Attempts per generator before giving up on a field.
pub const RETRY_BUDGET: u32 = 32;

/// Consecutive fruitless draws after which point sampling gives up.
const MAX_STALL: usize = 200;

pub const TAG_G4: &str = "canonical-g4";
pub const TAG_G6_GRASS: &str = "canonical-g6-grass";
pub const TAG_G6_SEXTIC: &str = "canonical-g6-sextic";
pub const TAG_G8_GRASS: &str = "canonical-g8-grass";
pub const TAG_K3: &str = "k3-g6";
pub const TAG_K3_SECTION: &str = "k3-g6-section";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Ci,
    Grass,
    Sextic,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Ci => "ci",
            Variant::Grass => "grass",
            Variant::Sextic => "sextic",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ci" => Ok(Variant::Ci),
            "grass" => Ok(Variant::Grass),
            "sextic" => Ok(Variant::Sextic),
            _ => Err(Error::InvalidArgument(format!(
                "unknown variant {s:?} (expected ci, grass or sextic)"
            ))),
        }
    }
}

/// Natural construction for a genus.
pub fn default_variant(genus: u32) -> Variant {
    if genus == 4 {
        Variant::Ci
    } else {
        Variant::Grass
    }
}

/// `h^0(qK)` of a canonical curve for `q <= 3`.
pub fn canonical_hilbert(genus: usize) -> BTreeMap<usize, usize> {
    [
        (0, 1),
        (1, genus),
        (2, 3 * (genus - 1)),
        (3, 5 * (genus - 1)),
    ]
    .into_iter()
    .collect()
}

/// `h^0(qL) = 2 + 5q^2` on a K3 surface of degree 10, for `1 <= q <= 3`.
pub fn k3_hilbert() -> BTreeMap<usize, usize> {
    std::iter::once((0, 1))
        .chain((1..=3).map(|q| (q, 2 + 5 * q * q)))
        .collect()
}

/// A projective model with its ideal and, optionally, sample points.
#[derive(Clone, Debug)]
pub struct CanonicalModel {
    pub presentation: PresentationModel,
    pub points: Option<EvaluationModel>,
}

impl CanonicalModel {
    pub fn field(&self) -> &Field {
        &self.presentation.field
    }

    pub fn nvars(&self) -> usize {
        self.presentation.n
    }

    pub fn genus(&self) -> Option<u32> {
        self.presentation.meta.genus
    }

    pub fn construction(&self) -> &str {
        &self.presentation.meta.construction
    }

    pub fn meta(&self) -> &ModelMeta {
        &self.presentation.meta
    }

    /// 2 for the K3 surface, 1 for curves.
    pub fn variety_dim(&self) -> usize {
        if self.construction() == TAG_K3 {
            2
        } else {
            1
        }
    }

    pub fn ring(&self, rep: Representation) -> Result<CoordinateRing> {
        match rep {
            Representation::Presentation => Ok(CoordinateRing::presentation(&self.presentation)),
            Representation::Evaluation => {
                let pts = self
                    .points
                    .as_ref()
                    .ok_or(Error::InsufficientPoints { needed: 1, have: 0 })?;
                Ok(CoordinateRing::evaluation(
                    self.field(),
                    pts,
                    &self.presentation.expected_hilbert,
                ))
            }
        }
    }

    /// The plane sextic this curve was built from, if any.
    pub fn plane_model(&self) -> Result<Option<NodalSexticModel>> {
        self.presentation
            .meta
            .plane_model
            .as_ref()
            .map(|v| NodalSexticModel::from_json(self.field(), v))
            .transpose()
    }

    /// Samples points by linear slicing until evaluation pieces up to
    /// degree `top` are trustworthy.
    pub fn attach_section_points<R: Rng + ?Sized>(
        &mut self,
        top: usize,
        rng: &mut R,
    ) -> Result<()> {
        let dim = self.variety_dim();
        let model = &self.presentation;
        let mut feed = PointFeed::new(model.field(), MAX_STALL, || {
            slice_points(model, dim, rng).map(Some)
        });
        let pts = collect_points(&model.field, model.n, top, &mut feed)?;
        self.points = Some(pts);
        Ok(())
    }

    /// Checks the expected Hilbert values in every available
    /// representation.
    pub fn validate(&self) -> Result<()> {
        let pres = self.ring(Representation::Presentation)?;
        for &q in self.presentation.expected_hilbert.keys() {
            pres.piece(q)?;
        }
        if let Some(pts) = &self.points {
            let eval = self.ring(Representation::Evaluation)?;
            for &q in self.presentation.expected_hilbert.keys() {
                if q == 0 || pts.len() >= sym_dim(self.nvars(), q) + crate::graded::EVALUATION_SLACK
                {
                    eval.piece(q)?;
                }
            }
            for p in pts.points() {
                if !self.presentation.vanishes_at(p) {
                    return Err(Error::Degenerate("sample point off the model".into()));
                }
            }
        }
        Ok(())
    }
}

/// Runs `attempt` on a single seeded stream until it succeeds, retrying
/// retryable failures. Running out of points is a property of the field,
/// not of the draw, so it is passed straight through.
pub fn with_retries<T>(
    seed: u64,
    what: &str,
    mut attempt: impl FnMut(&mut ChaCha8Rng) -> Result<T>,
) -> Result<(T, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::new();
    for i in 1..=RETRY_BUDGET {
        match attempt(&mut rng) {
            Ok(t) => return Ok((t, i)),
            Err(e @ Error::InsufficientPoints { .. }) => return Err(e),
            Err(e) if e.is_retryable() => last = e.to_string(),
            Err(e) => return Err(e),
        }
    }
    Err(Error::RetriesExhausted(format!(
        "{what}: {RETRY_BUDGET} attempts failed, last: {last}"
    )))
}

fn random_form<R: Rng + ?Sized>(field: &Field, n: usize, degree: usize, rng: &mut R) -> Generator {
    Generator {
        degree,
        coeffs: (0..sym_dim(n, degree)).map(|_| field.random(rng)).collect(),
    }
}

/// Reduced basis of the span of forms of one degree.
fn span_basis(
    field: &Field,
    n: usize,
    degree: usize,
    forms: &[Generator],
) -> Result<Vec<Generator>> {
    let rows = forms.iter().map(|g| g.coeffs.clone()).collect();
    let s = Subspace::from_rows(field, sym_dim(n, degree), rows)?;
    Ok(s.vectors()
        .map(|v| Generator {
            degree,
            coeffs: v.to_vec(),
        })
        .collect())
}

/// Quadrics of `Gr(2, k) ∩ P^{m-1}` for a random `P^{m-1}`, plus
/// `extra` random quadrics.
fn grassmannian_section<R: Rng + ?Sized>(
    field: &Field,
    k: usize,
    m: usize,
    extra: usize,
    rng: &mut R,
) -> Result<Vec<Generator>> {
    let gr = plucker_model(field, k);
    let param = grassmannian::random_parametrization(field, m, gr.nvars(), rng)?;
    let (mut quadrics, _) = restrict_to_linear_section(field, &gr.relations, &param)?;
    for _ in 0..extra {
        quadrics.push(random_form(field, m, 2, rng));
    }
    span_basis(field, m, 2, &quadrics)
}

fn finish(
    field: &Field,
    n: usize,
    generators: Vec<Generator>,
    expected: BTreeMap<usize, usize>,
    construction: &str,
    genus: u32,
) -> Result<CanonicalModel> {
    let mut presentation = PresentationModel::new(field, n, generators)?;
    presentation.expected_hilbert = expected;
    presentation.meta.construction = construction.into();
    presentation.meta.genus = Some(genus);
    Ok(CanonicalModel {
        presentation,
        points: None,
    })
}

fn draw_canonical<R: Rng + ?Sized>(
    genus: u32,
    variant: Variant,
    field: &Field,
    rng: &mut R,
) -> Result<CanonicalModel> {
    let g = genus as usize;
    let model = match (genus, variant) {
        (4, Variant::Ci) => {
            let gens = vec![random_form(field, 4, 2, rng), random_form(field, 4, 3, rng)];
            finish(field, 4, gens, canonical_hilbert(4), TAG_G4, 4)?
        }
        (6, Variant::Grass) => {
            let gens = grassmannian_section(field, 5, 6, 1, rng)?;
            finish(field, 6, gens, canonical_hilbert(6), TAG_G6_GRASS, 6)?
        }
        (8, Variant::Grass) => {
            let gens = grassmannian_section(field, 6, 8, 0, rng)?;
            finish(field, 8, gens, canonical_hilbert(8), TAG_G8_GRASS, 8)?
        }
        (6, Variant::Sextic) => {
            let sextic = draw_nodal_sextic(field, rng)?;
            canonical_from_sextic(&sextic, 3, rng)?
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "no {variant} construction for genus {genus}"
            )))
        }
    };
    debug_assert_eq!(model.nvars(), g);
    model.validate()?;
    Ok(model)
}

/// A random canonical curve of the given genus over `field`.
pub fn gen_canonical(
    genus: u32,
    variant: Variant,
    field: &Field,
    seed: u64,
) -> Result<CanonicalModel> {
    if !matches!(
        (genus, variant),
        (4, Variant::Ci) | (6, Variant::Grass) | (6, Variant::Sextic) | (8, Variant::Grass)
    ) {
        return Err(Error::InvalidArgument(format!(
            "no {variant} construction for genus {genus}"
        )));
    }
    let what = format!("genus {genus} {variant} model over {}", field.spec());
    let (mut model, attempts) = with_retries(seed, &what, |rng| {
        draw_canonical(genus, variant, field, rng)
    })?;
    model.presentation.meta.seed = seed;
    model.presentation.meta.attempts = attempts;
    Ok(model)
}

/// Canonical model of the sextic's normalization in `P^5`: sampled
/// plane points are mapped through the adjoint cubics and the quadrics
/// through their images are interpolated. The points are kept, enough
/// for evaluation pieces up to degree `top`.
pub fn canonical_from_sextic<R: Rng + ?Sized>(
    sextic: &NodalSexticModel,
    top: usize,
    rng: &mut R,
) -> Result<CanonicalModel> {
    let field = &sextic.field;
    let mut xs = sextic.abscissae(rng);
    let mut feed = PointFeed::new(field, MAX_STALL, || match xs.next() {
        None => Ok(None),
        Some(x0) => Ok(Some(
            sextic
                .points_over(x0)?
                .iter()
                .map(|p| sextic.canonical_image(p))
                .collect(),
        )),
    });
    let pts = collect_points(field, 6, top.max(2), &mut feed)?;
    let ideal = eval_matrix(field, &pts, 2).kernel_basis();
    if ideal.dim() != 6 {
        return Err(Error::HilbertMismatch {
            degree: 2,
            expected: 15,
            observed: 21 - ideal.dim(),
        });
    }
    let gens = ideal
        .vectors()
        .map(|v| Generator {
            degree: 2,
            coeffs: v.to_vec(),
        })
        .collect();
    let mut model = finish(field, 6, gens, canonical_hilbert(6), TAG_G6_SEXTIC, 6)?;
    model.presentation.meta.plane_model = Some(sextic.to_json());
    model.points = Some(pts);
    Ok(model)
}

/// A random nodal sextic, retried until its nodes are ordinary.
pub fn gen_nodal_sextic(field: &Field, seed: u64) -> Result<NodalSexticModel> {
    with_retries(seed, "nodal sextic", |rng| draw_nodal_sextic(field, rng)).map(|(s, _)| s)
}

/// `Gr(2,5) ∩ P^6 ∩ Q`: a K3 surface of degree 10 in `P^6`.
pub fn gen_k3_g6(field: &Field, seed: u64) -> Result<CanonicalModel> {
    let what = format!("genus 6 K3 model over {}", field.spec());
    let (mut model, attempts) = with_retries(seed, &what, |rng| {
        let gens = grassmannian_section(field, 5, 7, 1, rng)?;
        let m = finish(field, 7, gens, k3_hilbert(), TAG_K3, 6)?;
        m.validate()?;
        Ok(m)
    })?;
    model.presentation.meta.seed = seed;
    model.presentation.meta.attempts = attempts;
    Ok(model)
}

/// A random hyperplane section of a surface model, as a canonical curve.
pub fn hyperplane_section(surface: &CanonicalModel, seed: u64) -> Result<CanonicalModel> {
    let field = surface.field();
    let n = surface.nvars();
    let genus = surface.genus().unwrap_or(n as u32 - 1);
    let what = format!("hyperplane section over {}", field.spec());
    let (mut model, attempts) = with_retries(seed, &what, |rng| {
        let param = grassmannian::random_parametrization(field, n - 1, n, rng)?;
        let (gens, _) =
            restrict_to_linear_section(field, &surface.presentation.generators, &param)?;
        let gens = span_basis(field, n - 1, 2, &gens)?;
        let m = finish(
            field,
            n - 1,
            gens,
            canonical_hilbert(genus as usize),
            TAG_K3_SECTION,
            genus,
        )?;
        m.validate()?;
        Ok(m)
    })?;
    model.presentation.meta.seed = seed;
    model.presentation.meta.attempts = attempts;
    Ok(model)
}

/// Random points of a model, in normalized form.
pub fn random_points_on<R: Rng + ?Sized>(
    model: &CanonicalModel,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<Fel>>> {
    sample_section_points(
        &model.presentation,
        model.variety_dim(),
        count,
        MAX_STALL,
        rng,
    )
}
