//! Formal contexts, concept enumeration and their observable diameter.
//!
//! A finite context `(G, M, I)` becomes a geometric data set on the attribute
//! set `M` (uniform measure) whose features are the scaled indicators
//! `|A|/|G| * 1_B`, one per concept `(A, B)`. The partial diameter of such a
//! feature is `|A|/|G|` while `alpha < |B|/|M| < 1 - alpha` and zero
//! otherwise, so the whole profile only depends on the multiset of
//! `(|A|, |B|)` pairs, which [`ConceptSummary`] records.

use std::collections::{BTreeMap, HashSet};

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::measure::GeometricDataSet;
use crate::profile::{delta, ObsDiamProfile};
use crate::report::{DimensionReport, ExactDimension};

pub const DEFAULT_CONCEPT_CAP: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalContext {
    objects: Vec<String>,
    attributes: Vec<String>,
    /// Per object, the set of incident attributes.
    rows: Vec<FixedBitSet>,
    /// Per attribute, the set of incident objects.
    cols: Vec<FixedBitSet>,
}

impl FormalContext {
    pub fn new(objects: Vec<String>, attributes: Vec<String>, incidence: &[Vec<bool>]) -> Result<Self> {
        if objects.is_empty() || attributes.is_empty() {
            return Err(Error::invalid("formal context needs objects and attributes"));
        }
        check_unique(&objects, "object")?;
        check_unique(&attributes, "attribute")?;
        if incidence.len() != objects.len() {
            return Err(Error::invalid(format!(
                "{} incidence rows for {} objects",
                incidence.len(),
                objects.len()
            )));
        }
        let (g, m) = (objects.len(), attributes.len());
        let mut rows = vec![FixedBitSet::with_capacity(m); g];
        let mut cols = vec![FixedBitSet::with_capacity(g); m];
        for (i, row) in incidence.iter().enumerate() {
            if row.len() != m {
                return Err(Error::invalid(format!(
                    "incidence row {i} has {} cells for {m} attributes",
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                if x {
                    rows[i].insert(j);
                    cols[j].insert(i);
                }
            }
        }
        Ok(Self {
            objects,
            attributes,
            rows,
            cols,
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn incident(&self, g: usize, m: usize) -> bool {
        self.rows[g].contains(m)
    }

    /// Incidence as a dense boolean matrix.
    pub fn incidence(&self) -> Vec<Vec<bool>> {
        (0..self.n_objects())
            .map(|g| (0..self.n_attributes()).map(|m| self.incident(g, m)).collect())
            .collect()
    }

    /// `A'`: attributes shared by every object in `objects`.
    pub fn derive_up(&self, objects: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.n_attributes());
        out.insert_range(..);
        for g in objects.ones() {
            out.intersect_with(&self.rows[g]);
        }
        out
    }

    /// `B'`: objects having every attribute in `attributes`.
    pub fn derive_down(&self, attributes: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.n_objects());
        out.insert_range(..);
        for m in attributes.ones() {
            out.intersect_with(&self.cols[m]);
        }
        out
    }

    /// Same context with objects and attributes reordered: new object `i` is
    /// old object `object_order[i]`, likewise for attributes.
    pub fn permuted(&self, object_order: &[usize], attribute_order: &[usize]) -> Result<Self> {
        let is_perm = |p: &[usize], n: usize| {
            p.len() == n && p.iter().copied().collect::<HashSet<_>>().len() == n && p.iter().all(|&i| i < n)
        };
        if !is_perm(object_order, self.n_objects()) || !is_perm(attribute_order, self.n_attributes()) {
            return Err(Error::invalid("orders must be permutations"));
        }
        let incidence: Vec<Vec<bool>> = object_order
            .iter()
            .map(|&g| attribute_order.iter().map(|&m| self.incident(g, m)).collect())
            .collect();
        Self::new(
            object_order.iter().map(|&g| self.objects[g].clone()).collect(),
            attribute_order.iter().map(|&m| self.attributes[m].clone()).collect(),
            &incidence,
        )
    }
}

fn check_unique(names: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(names.len());
    for name in names {
        if !seen.insert(name.as_str()) {
            return Err(Error::invalid(format!("duplicate {what} name '{name}'")));
        }
    }
    Ok(())
}

fn numbered(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

/// `([n], [n], =)`.
pub fn nominal_scale(n: usize) -> Result<FormalContext> {
    let incidence: Vec<Vec<bool>> = (0..n).map(|g| (0..n).map(|m| g == m).collect()).collect();
    FormalContext::new(numbered(n), numbered(n), &incidence)
}

/// `([n], [n], !=)`.
pub fn contranominal_scale(n: usize) -> Result<FormalContext> {
    let incidence: Vec<Vec<bool>> = (0..n).map(|g| (0..n).map(|m| g != m).collect()).collect();
    FormalContext::new(numbered(n), numbered(n), &incidence)
}

/// Resamples every cell as an independent Bernoulli draw with the context's
/// incidence density. Names are kept; margins are not preserved.
pub fn randomize_context(ctx: &FormalContext, seed: u64) -> Result<FormalContext> {
    let cells = (ctx.n_objects() * ctx.n_attributes()) as f64;
    let filled: usize = ctx.rows.iter().map(|r| r.count_ones(..)).sum();
    let density = filled as f64 / cells;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let incidence: Vec<Vec<bool>> = (0..ctx.n_objects())
        .map(|_| (0..ctx.n_attributes()).map(|_| rng.random_bool(density)).collect())
        .collect();
    FormalContext::new(ctx.objects.clone(), ctx.attributes.clone(), &incidence)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalConcept {
    pub extent: FixedBitSet,
    pub intent: FixedBitSet,
}

/// Streams all concepts in lectic order of their intents.
pub struct Concepts<'a> {
    ctx: &'a FormalContext,
    next: Option<FormalConcept>,
    emitted: u64,
    cap: u64,
}

impl Iterator for Concepts<'_> {
    type Item = Result<FormalConcept>;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        if self.emitted == self.cap {
            return Some(Err(Error::Overflow { cap: self.cap }));
        }
        self.emitted += 1;
        self.next = next_closure(self.ctx, &current.intent);
        Some(Ok(current))
    }
}

/// Enumerates every concept exactly once; yields [`Error::Overflow`] (and then
/// stops) if more than `cap` concepts exist.
pub fn enumerate_concepts(ctx: &FormalContext, cap: u64) -> Concepts<'_> {
    let extent = {
        let mut all = FixedBitSet::with_capacity(ctx.n_objects());
        all.insert_range(..);
        all
    };
    let intent = ctx.derive_up(&extent);
    Concepts {
        ctx,
        next: Some(FormalConcept { extent, intent }),
        emitted: 0,
        cap,
    }
}

/// Lectic successor of the closed intent `current`.
fn next_closure(ctx: &FormalContext, current: &FixedBitSet) -> Option<FormalConcept> {
    let mut prefix = current.clone();
    for i in (0..ctx.n_attributes()).rev() {
        if prefix.contains(i) {
            prefix.set(i, false);
            continue;
        }
        let mut candidate = prefix.clone();
        candidate.insert(i);
        let extent = ctx.derive_down(&candidate);
        let intent = ctx.derive_up(&extent);
        // Accept only if closing added nothing below i.
        if intent.ones().take_while(|&j| j < i).all(|j| prefix.contains(j)) {
            return Some(FormalConcept { extent, intent });
        }
    }
    None
}

/// Multiset of `(|extent|, |intent|)` over all concepts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConceptSummary {
    counts: BTreeMap<(usize, usize), u64>,
}

impl ConceptSummary {
    pub fn add(&mut self, extent_size: usize, intent_size: usize) {
        *self.counts.entry((extent_size, intent_size)).or_insert(0) += 1;
    }

    pub fn merge(&mut self, other: &ConceptSummary) {
        for (&k, &c) in &other.counts {
            *self.counts.entry(k).or_insert(0) += c;
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }
}

pub fn concept_summary(ctx: &FormalContext, cap: u64) -> Result<ConceptSummary> {
    let mut summary = ConceptSummary::default();
    for concept in enumerate_concepts(ctx, cap) {
        let c = concept?;
        summary.add(c.extent.count_ones(..), c.intent.count_ones(..));
    }
    Ok(summary)
}

fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact observable-diameter profile of the data set associated to a context
/// with `n_objects` objects and `n_attributes` attributes.
pub fn fca_profile(summary: &ConceptSummary, n_objects: usize, n_attributes: usize) -> ObsDiamProfile<BigRational> {
    // (end of support, value): the concept contributes on [0, end).
    let mut contributions: Vec<(usize, usize)> = summary
        .iter()
        .filter(|((_, b), _)| *b > 0 && *b < n_attributes)
        .map(|((a, b), _)| (b.min(n_attributes - b), a))
        .collect();
    if contributions.is_empty() {
        return ObsDiamProfile::zero();
    }
    // Ends are all < 1/2, so in units of 1/|M| they are distinct integers.
    contributions.sort_unstable_by(|x, y| y.cmp(x));
    let mut ends: Vec<usize> = contributions.iter().map(|c| c.0).collect();
    ends.push(0);
    ends.dedup();
    ends.reverse();

    // Value on [ends[i], ends[i+1]) is the max extent among contributions whose end exceeds ends[i].
    let mut values = vec![0usize; ends.len()];
    let mut best = 0;
    let mut next = 0;
    for i in (0..ends.len()).rev() {
        while next < contributions.len() && contributions[next].0 > ends[i] {
            best = best.max(contributions[next].1);
            next += 1;
        }
        values[i] = best;
    }
    let mut breakpoints: Vec<BigRational> = ends.iter().map(|&e| ratio(e, n_attributes)).collect();
    breakpoints.push(BigRational::one());
    let values = values.into_iter().map(|a| ratio(a, n_objects)).collect();
    ObsDiamProfile::new(breakpoints, values)
        .expect("pointwise max of nested indicator steps is antitone")
        .merged()
}

/// Exact Δ and ∂ of the data set associated to `ctx`.
pub fn fca_intrinsic_dimension(ctx: &FormalContext, cap: u64) -> Result<DimensionReport> {
    let summary = concept_summary(ctx, cap)?;
    let p = fca_profile(&summary, ctx.n_objects(), ctx.n_attributes());
    let exact = ExactDimension::from_delta(delta(&p));
    DimensionReport::from_exact(exact, ctx.n_attributes(), summary.total() as usize)
}

/// The associated geometric data set in floating point: points are the
/// attributes, one feature `|A|/|G| * 1_B` per concept.
pub fn associated_data_set(ctx: &FormalContext, cap: u64) -> Result<GeometricDataSet> {
    let g = ctx.n_objects() as f64;
    let m = ctx.n_attributes();
    let features = enumerate_concepts(ctx, cap)
        .map(|c| {
            let c = c?;
            let a = c.extent.count_ones(..) as f64 / g;
            Ok((0..m).map(|j| if c.intent.contains(j) { a } else { 0.0 }).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    GeometricDataSet::uniform(m, features)
}
