//! Genetic search for the key-point subset with the lowest coverage alpha.
//!
//! A chromosome carries one inclusion flag per key-point. Each generation
//! draws parent pairs by roulette wheel, splices them with a one-point
//! crossover, mutates the children and appends them to the population,
//! which is then truncated back to its maximum size.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pointset::FeatureSet;
use crate::ripley::{CoverageMetric, EdgeCorrection, PairTable, RadiusGrid};

/// Fitness assigned to masks that select fewer than two points.
pub const PENALTY: f64 = f64::INFINITY;

/// What a mutation rate is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MutationUnit {
    /// Every gene flips independently with probability `rate`.
    #[default]
    Gene,
    /// With probability `rate` a chromosome has one random gene flipped.
    Chromosome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population_max: usize,
    pub population_init: usize,
    pub generations: usize,
    pub crossovers_per_generation: usize,
    pub mutation_rate: f64,
    pub mutation_unit: MutationUnit,
    pub elitism: bool,
    pub rng_seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_max: 100,
            population_init: 10,
            generations: 20,
            crossovers_per_generation: 10,
            mutation_rate: 0.030,
            mutation_unit: MutationUnit::Gene,
            elitism: true,
            rng_seed: 42,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_init == 0 || self.population_init > self.population_max {
            return Err(Error::InvalidArgument(format!(
                "need 0 < population_init <= population_max, got {} and {}",
                self.population_init, self.population_max
            )));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::InvalidArgument(format!(
                "mutation rate must lie in [0, 1], got {}",
                self.mutation_rate
            )));
        }
        Ok(())
    }
}

/// Inclusion mask over a feature set plus its cached fitness.
#[derive(Debug, Clone, PartialEq)]
pub struct Chromosome {
    mask: Vec<bool>,
    fitness: Option<f64>,
}

impl Chromosome {
    pub fn new(mask: Vec<bool>) -> Self {
        Self {
            mask,
            fitness: None,
        }
    }

    pub fn with_fitness(mask: Vec<bool>, fitness: f64) -> Self {
        Self {
            mask,
            fitness: Some(fitness),
        }
    }

    pub fn all(n: usize) -> Self {
        Self::new(vec![true; n])
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn selected(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// `None` until evaluated; `Some(PENALTY)` for degenerate masks.
    pub fn fitness(&self) -> Option<f64> {
        self.fitness
    }

    pub fn evaluate(&mut self, evaluator: &Evaluator) {
        self.fitness = Some(evaluator.fitness(&self.mask));
    }
}

/// Coverage alpha of the points selected by `mask`, or [`PENALTY`] when
/// fewer than two are selected.
pub fn fitness(
    mask: &Chromosome,
    fs: &FeatureSet,
    grid: &RadiusGrid,
    correction: EdgeCorrection,
) -> Result<f64> {
    if mask.len() != fs.len() {
        return Err(Error::InvalidArgument(format!(
            "chromosome of length {} bound to {} features",
            mask.len(),
            fs.len()
        )));
    }
    let eval = Evaluator::new(fs, CoverageMetric::new(*grid, correction));
    Ok(eval.fitness(mask.mask()))
}

/// Scores masks over one feature set, reusing the pairwise distance table.
#[derive(Debug, Clone)]
pub struct Evaluator {
    metric: CoverageMetric,
    table: PairTable,
}

impl Evaluator {
    pub fn new(fs: &FeatureSet, metric: CoverageMetric) -> Self {
        Self {
            table: metric.pair_table(fs),
            metric,
        }
    }

    pub fn fitness(&self, mask: &[bool]) -> f64 {
        self.metric
            .alpha_masked(&self.table, mask)
            .unwrap_or(PENALTY)
    }
}

/// Roulette weights for a minimised objective: `(worst - alpha) + eps` with
/// `eps = 1e-9 * (worst - best + 1)`. Penalised or unevaluated members get
/// weight zero.
pub fn selection_weights(population: &[Chromosome]) -> Vec<f64> {
    let finite = || {
        population
            .iter()
            .filter_map(|c| c.fitness)
            .filter(|f| f.is_finite())
    };
    let worst = finite().fold(f64::NEG_INFINITY, f64::max);
    let best = finite().fold(f64::INFINITY, f64::min);
    if !worst.is_finite() {
        return vec![0.0; population.len()];
    }
    let eps = 1e-9 * (worst - best + 1.0);
    population
        .iter()
        .map(|c| match c.fitness {
            Some(f) if f.is_finite() => (worst - f) + eps,
            _ => 0.0,
        })
        .collect()
}

/// Cumulative scan of normalised `weights` against the draw `u` in `[0, 1)`:
/// returns the first index whose accumulated weight exceeds `u`. All-zero
/// weights fall back to a uniform choice driven by the same draw.
pub fn roulette_pick(weights: &[f64], u: f64) -> usize {
    assert!(!weights.is_empty(), "roulette over an empty population");
    let total: f64 = weights.iter().sum();
    if !total.is_finite() || total <= 0.0 {
        return ((u * weights.len() as f64) as usize).min(weights.len() - 1);
    }
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w / total;
        if acc > u {
            return i;
        }
    }
    // rounding left the final cumulative value just under u
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

pub fn roulette_select<R: Rng + ?Sized>(population: &[Chromosome], rng: &mut R) -> usize {
    let weights = selection_weights(population);
    roulette_pick(&weights, rng.random::<f64>())
}

/// Children `a[..cut] ++ b[cut..]` and `b[..cut] ++ a[cut..]`, unevaluated.
pub fn crossover_one_point(
    a: &Chromosome,
    b: &Chromosome,
    cut: usize,
) -> Result<(Chromosome, Chromosome)> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "parents differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    if cut > a.len() {
        return Err(Error::InvalidArgument(format!(
            "cut {cut} beyond chromosome length {}",
            a.len()
        )));
    }
    let splice = |head: &[bool], tail: &[bool]| {
        let mut m = Vec::with_capacity(head.len());
        m.extend_from_slice(&head[..cut]);
        m.extend_from_slice(&tail[cut..]);
        Chromosome::new(m)
    };
    Ok((splice(&a.mask, &b.mask), splice(&b.mask, &a.mask)))
}

/// Negates each gene independently with probability `rate`.
pub fn mutate<R: Rng + ?Sized>(c: &Chromosome, rate: f64, rng: &mut R) -> Chromosome {
    let mask = c
        .mask
        .iter()
        .map(|&g| if rng.random::<f64>() < rate { !g } else { g })
        .collect();
    Chromosome::new(mask)
}

/// With probability `rate`, negates one uniformly chosen gene.
pub fn mutate_one_gene<R: Rng + ?Sized>(c: &Chromosome, rate: f64, rng: &mut R) -> Chromosome {
    let mut mask = c.mask.clone();
    if !mask.is_empty() && rng.random::<f64>() < rate {
        let i = rng.random_range(0..mask.len());
        mask[i] = !mask[i];
    }
    Chromosome::new(mask)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_alpha: f64,
    pub selected_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub refined: FeatureSet,
    pub mask: Vec<bool>,
    pub history: Vec<GenerationRecord>,
    pub original_alpha: f64,
    pub refined_alpha: f64,
}

#[derive(Debug, Clone)]
struct Member {
    chrom: Chromosome,
    selected: usize,
    born: u64,
}

impl Member {
    fn alpha(&self) -> f64 {
        self.chrom.fitness.unwrap_or(PENALTY)
    }

    /// Lower alpha first, then fewer features, then earlier creation.
    fn rank(&self, other: &Self) -> Ordering {
        self.alpha()
            .total_cmp(&other.alpha())
            .then(self.selected.cmp(&other.selected))
            .then(self.born.cmp(&other.born))
    }
}

/// Runs the genetic search with the `pi r^2` Poisson expectation.
pub fn evolve(
    fs: &FeatureSet,
    config: &GaConfig,
    grid: &RadiusGrid,
    correction: EdgeCorrection,
) -> Result<SelectionResult> {
    evolve_with_metric(fs, config, &CoverageMetric::new(*grid, correction))
}

pub fn evolve_with_metric(
    fs: &FeatureSet,
    config: &GaConfig,
    metric: &CoverageMetric,
) -> Result<SelectionResult> {
    config.validate()?;
    let n = fs.len();
    if n < 2 {
        return Err(Error::InsufficientPoints(n));
    }
    let evaluator = Evaluator::new(fs, *metric);
    let mut next_id = 0u64;
    let mut spawn = |chrom: Chromosome| {
        let selected = chrom.selected();
        let m = Member {
            chrom,
            selected,
            born: next_id,
        };
        next_id += 1;
        m
    };

    // stream 0 seeds the initial population, stream g drives generation g
    let mut rng = stream(config.rng_seed, 0);
    let mut fresh = vec![Chromosome::all(n)];
    fresh.extend((1..config.population_init).map(|_| {
        Chromosome::new((0..n).map(|_| rng.random_bool(0.5)).collect())
    }));
    evaluate_all(&mut fresh, &evaluator);
    let mut population: Vec<Member> = fresh.into_iter().map(&mut spawn).collect();

    let original = population[0].clone();
    let original_alpha = original.alpha();
    let mut history = vec![GenerationRecord {
        generation: 0,
        best_alpha: original_alpha,
        selected_count: n,
    }];
    // random members compete from generation 1 onwards
    let mut best = original;

    for generation in 1..=config.generations {
        let mut rng = stream(config.rng_seed, generation as u64);
        let chroms: Vec<Chromosome> = population.iter().map(|m| m.chrom.clone()).collect();
        let weights = selection_weights(&chroms);

        let mut offspring = Vec::with_capacity(2 * config.crossovers_per_generation);
        for _ in 0..config.crossovers_per_generation {
            let a = roulette_pick(&weights, rng.random::<f64>());
            let b = roulette_pick(&weights, rng.random::<f64>());
            let cut = rng.random_range(0..=n);
            let (c1, c2) = crossover_one_point(&chroms[a], &chroms[b], cut)?;
            for child in [c1, c2] {
                offspring.push(match config.mutation_unit {
                    MutationUnit::Gene => mutate(&child, config.mutation_rate, &mut rng),
                    MutationUnit::Chromosome => {
                        mutate_one_gene(&child, config.mutation_rate, &mut rng)
                    }
                });
            }
        }
        evaluate_all(&mut offspring, &evaluator);
        population.extend(offspring.into_iter().map(&mut spawn));

        if config.elitism {
            population.sort_by(Member::rank);
            population.truncate(config.population_max);
            if population[0].rank(&best) == Ordering::Less {
                best = population[0].clone();
            }
        } else {
            // age-based replacement: the newest members survive
            let excess = population.len().saturating_sub(config.population_max);
            population.drain(..excess);
            best = population
                .iter()
                .min_by(|a, b| a.rank(b))
                .expect("population is never empty")
                .clone();
        }

        history.push(GenerationRecord {
            generation,
            best_alpha: best.alpha(),
            selected_count: best.selected,
        });
    }

    let refined = fs.subset(best.chrom.mask())?;
    Ok(SelectionResult {
        refined,
        refined_alpha: best.alpha(),
        mask: best.chrom.mask,
        history,
        original_alpha,
    })
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn evaluate_all(chroms: &mut [Chromosome], evaluator: &Evaluator) {
    chroms.par_iter_mut().for_each(|c| c.evaluate(evaluator));
}
