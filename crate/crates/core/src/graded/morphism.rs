use std::collections::HashMap;
use std::sync::Arc;

use super::chart::{Chart, Role};
use super::superfunction::Superfunction;
use super::GradedError;
use crate::scalar::Scalar;

/// Degree-preserving algebra map from functions on `target` to functions on
/// `source`, fixed by the images of the target coordinates.
#[derive(Clone, Debug)]
pub struct Morphism {
    target: Arc<Chart>,
    source: Arc<Chart>,
    images: Vec<Superfunction>,
    base_images: Vec<Scalar>,
    rename: Option<Vec<usize>>,
}

impl Morphism {
    /// `images[a]` is the pullback of target coordinate `a`.
    pub fn new(target: &Arc<Chart>, source: &Arc<Chart>, images: Vec<Superfunction>) -> Result<Self, GradedError> {
        if images.len() != target.len() {
            return Err(GradedError::DegreeMismatch(format!(
                "expected {} coordinate images, got {}",
                target.len(),
                images.len()
            )));
        }
        let mut base_images = Vec::with_capacity(target.base_count());
        for (a, img) in images.iter().enumerate() {
            if !Chart::same(img.chart(), source) {
                return Err(GradedError::ChartMismatch);
            }
            let want = target.degree(a);
            let name = &target.coordinate(a).name;
            match img.degree() {
                None if img.is_zero() => {}
                Some(d) if d == want => {}
                _ => {
                    return Err(GradedError::DegreeMismatch(format!(
                        "image of '{}' must have degree {}",
                        name, want
                    )))
                }
            }
            if let Role::Base(_) = target.role(a) {
                base_images.push(img.as_scalar().unwrap_or_default());
            }
        }
        let rename = base_images
            .iter()
            .map(|s| {
                let n = s.numerator();
                if !s.denominator_factors().is_empty() || n.len() != 1 {
                    return None;
                }
                let (e, c) = n.leading()?;
                let mut it = e.iter();
                match (it.next(), it.next()) {
                    (Some((v, 1)), None) if num_traits::One::is_one(c) => Some(v),
                    _ => None,
                }
            })
            .collect::<Option<Vec<_>>>();
        Ok(Morphism {
            target: target.clone(),
            source: source.clone(),
            images,
            base_images,
            rename,
        })
    }

    /// Images given by name; unnamed target coordinates go to the source
    /// coordinate of the same name.
    pub fn by_names(
        target: &Arc<Chart>,
        source: &Arc<Chart>,
        named: &HashMap<String, Superfunction>,
    ) -> Result<Self, GradedError> {
        let mut images = Vec::with_capacity(target.len());
        for c in target.coordinates() {
            let img = match named.get(&c.name) {
                Some(f) => f.clone(),
                None => Superfunction::named(source, &c.name)?,
            };
            images.push(img);
        }
        Morphism::new(target, source, images)
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn image(&self, a: usize) -> &Superfunction {
        &self.images[a]
    }

    pub fn pull_scalar(&self, c: &Scalar) -> Result<Scalar, GradedError> {
        match &self.rename {
            Some(map) => Ok(c.rename(map)),
            None => Ok(c.substitute(&self.base_images)?),
        }
    }

    pub fn pull(&self, f: &Superfunction) -> Result<Superfunction, GradedError> {
        if !Chart::same(f.chart(), &self.target) {
            return Err(GradedError::ChartMismatch);
        }
        let mut out = Superfunction::zero(&self.source);
        let mut powers: HashMap<(usize, u8), Superfunction> = HashMap::new();
        for (m, c) in f.terms() {
            let mut t = Superfunction::scalar(&self.source, self.pull_scalar(c)?);
            for s in 0..self.target.slot_count() {
                let e = m.exponent(s);
                if e == 0 {
                    continue;
                }
                let p = powers
                    .entry((s, e))
                    .or_insert_with(|| self.images[self.target.slot_coordinate(s)].pow(e as u32));
                t = t.try_mul(p)?;
                if t.is_zero() {
                    break;
                }
            }
            out = out.try_add(&t)?;
        }
        Ok(out)
    }

    /// `self ∘ other`: pull back along `self`, then along `other`.
    pub fn then(&self, other: &Morphism) -> Result<Morphism, GradedError> {
        if !Chart::same(&self.source, &other.target) {
            return Err(GradedError::ChartMismatch);
        }
        let images = self
            .images
            .iter()
            .map(|f| other.pull(f))
            .collect::<Result<Vec<_>, _>>()?;
        Morphism::new(&self.target, &other.source, images)
    }
}
