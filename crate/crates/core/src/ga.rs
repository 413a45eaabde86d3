//! Genetic search over candidate criterion profiles.
//!
//! A chromosome is one real value per criterion. Its fitness is the net flow
//! it earns when ranked by PROMETHEE among the reference alternatives, so the
//! search drifts towards profiles that outrank the reference set. Evaluations
//! are memoized on the exact bit pattern of the genes.
//!
//! All random draws come from one seeded ChaCha stream, consumed in a fixed
//! order each generation: selection, then crossover, then mutation.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DecisionMatrix, Direction, Interval};
use crate::objectives::{evaluate_portfolio, PortfolioSpec, WeightVector};
use crate::promethee::{rank_by_score, RankedOrder};
use crate::screening::{count_violations, Condition, ConditionSet};

/// Fitness offset per violated condition. Twice the width of the net-flow
/// range, so any infeasible profile scores below every feasible one.
pub const VIOLATION_PENALTY: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneBounds(Vec<Interval>);

impl GeneBounds {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        if let Some(i) = intervals.iter().find(|i| i.lo.partial_cmp(&i.hi).is_none_or(|o| o.is_gt())) {
            return Err(Error::InvalidGaConfig(format!("gene bound {i} is not ordered")));
        }
        Ok(GeneBounds(intervals))
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, c: &Chromosome) -> bool {
        c.genes.len() == self.0.len() && self.0.iter().zip(&c.genes).all(|(i, g)| i.contains(*g))
    }
}

/// Per criterion: the condition's interval when one is configured, else the
/// observed `[min, max]` of the column. Half-open conditions clip the
/// observed range on their bounded side.
pub fn default_bounds(matrix: &DecisionMatrix, conds: &ConditionSet) -> Result<GeneBounds> {
    if matrix.n_alternatives() == 0 {
        return Err(Error::TooFewAlternatives { needed: 1, found: 0 });
    }
    let mut bounds = Vec::with_capacity(matrix.n_criteria());
    for (j, c) in matrix.criteria().iter().enumerate() {
        let observed = matrix.column_range(j).expect("matrix has alternatives");
        let interval = match conds.get(&c.id) {
            Some(Condition::Within(i)) => *i,
            Some(Condition::AtLeast(lo)) => Interval {
                lo: *lo,
                hi: observed.hi.max(*lo),
            },
            Some(Condition::AtMost(hi)) => Interval {
                lo: observed.lo.min(*hi),
                hi: *hi,
            },
            None => c.feasible_interval.unwrap_or(observed),
        };
        bounds.push(interval);
    }
    GeneBounds::new(bounds)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Chromosome {
    pub genes: Vec<f64>,
}

impl Chromosome {
    pub fn new(genes: Vec<f64>) -> Self {
        Chromosome { genes }
    }

    fn key(&self) -> Vec<u64> {
        self.genes.iter().map(|g| g.to_bits()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub elitism_count: usize,
    pub seed: u64,
    pub duplicate_rejection_attempts: usize,
    pub use_cache: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 50,
            generations: 200,
            crossover_rate: 0.9,
            mutation_rate: 0.05,
            elitism_count: 2,
            seed: 42,
            duplicate_rejection_attempts: 10,
            use_cache: true,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidGaConfig(m));
        if self.population_size == 0 {
            return bad("population size must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return bad(format!("crossover rate {} outside [0, 1]", self.crossover_rate));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad(format!("mutation rate {} outside [0, 1]", self.mutation_rate));
        }
        if self.elitism_count >= self.population_size {
            return bad(format!(
                "elitism count {} must be below population size {}",
                self.elitism_count, self.population_size
            ));
        }
        if self.duplicate_rejection_attempts == 0 {
            return bad("duplicate rejection attempts must be positive".into());
        }
        Ok(())
    }
}

pub trait Fitness {
    fn gene_count(&self) -> usize;

    fn gene_labels(&self) -> Vec<String> {
        (1..=self.gene_count()).map(|i| format!("g{i}")).collect()
    }

    fn evaluate(&self, genes: &[f64]) -> Result<f64>;
}

/// Net flow of a candidate profile inserted among the reference alternatives.
#[derive(Debug, Clone)]
pub struct NetFlowFitness {
    reference: DecisionMatrix,
    weights: Vec<f64>,
    conditions: Vec<(usize, Condition)>,
}

impl NetFlowFitness {
    pub fn new(reference: &DecisionMatrix) -> Result<Self> {
        if reference.n_alternatives() == 0 {
            return Err(Error::TooFewAlternatives { needed: 1, found: 0 });
        }
        Ok(NetFlowFitness {
            weights: reference.normalized_weights()?,
            reference: reference.clone(),
            conditions: Vec::new(),
        })
    }

    /// Subtract [`VIOLATION_PENALTY`] for each condition the candidate breaks.
    pub fn with_conditions(mut self, conds: &ConditionSet) -> Result<Self> {
        self.conditions = conds.resolve(&self.reference)?;
        Ok(self)
    }

    pub fn reference(&self) -> &DecisionMatrix {
        &self.reference
    }

    fn preference(&self, better: &[f64], worse: &[f64]) -> f64 {
        let total: f64 = self.weights.iter().sum();
        let sum: f64 = self
            .reference
            .criteria()
            .iter()
            .zip(&self.weights)
            .zip(better.iter().zip(worse))
            .map(|((c, w), (x, y))| {
                let d = x - y;
                let d = match c.direction {
                    Direction::Maximize => d,
                    Direction::Minimize => -d,
                };
                w * c.preference.value(d)
            })
            .sum();
        sum / total
    }

    /// Net flow only, without the condition penalty.
    pub fn net_flow(&self, genes: &[f64]) -> Result<f64> {
        if genes.len() != self.reference.n_criteria() {
            return Err(Error::DimensionMismatch {
                expected: self.reference.n_criteria(),
                found: genes.len(),
            });
        }
        let n = self.reference.n_alternatives() as f64;
        let (out, inc) = self
            .reference
            .alternatives()
            .iter()
            .fold((0.0, 0.0), |(out, inc), alt| {
                (
                    out + self.preference(genes, &alt.values),
                    inc + self.preference(&alt.values, genes),
                )
            });
        Ok(out / n - inc / n)
    }
}

impl Fitness for NetFlowFitness {
    fn gene_count(&self) -> usize {
        self.reference.n_criteria()
    }

    fn gene_labels(&self) -> Vec<String> {
        self.reference.criteria().iter().map(|c| c.id.clone()).collect()
    }

    fn evaluate(&self, genes: &[f64]) -> Result<f64> {
        let net = self.net_flow(genes)?;
        let violations = count_violations(genes, &self.conditions);
        Ok(net - VIOLATION_PENALTY * violations as f64)
    }
}

/// Penalized mean-variance score of raw allocation weights.
#[derive(Debug, Clone)]
pub struct PortfolioFitness {
    pub spec: PortfolioSpec,
    pub penalty: f64,
}

impl Fitness for PortfolioFitness {
    fn gene_count(&self) -> usize {
        self.spec.n_assets()
    }

    fn gene_labels(&self) -> Vec<String> {
        (1..=self.gene_count()).map(|i| format!("w{i}")).collect()
    }

    fn evaluate(&self, genes: &[f64]) -> Result<f64> {
        let w = WeightVector(genes.to_vec());
        Ok(evaluate_portfolio(&w, &self.spec, self.penalty)?.penalized_score)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
}

/// Memo table keyed on the exact bit pattern of a gene list.
#[derive(Debug, Default)]
pub struct FitnessCache {
    enabled: bool,
    table: HashMap<Vec<u64>, f64>,
    stats: CacheStats,
}

impl FitnessCache {
    pub fn new(enabled: bool) -> Self {
        FitnessCache {
            enabled,
            ..Default::default()
        }
    }

    pub fn stats(&self) -> CacheStats {
        self.stats
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn evaluate<F: Fitness + ?Sized>(&mut self, f: &F, c: &Chromosome) -> Result<f64> {
        if !self.enabled {
            self.stats.misses += 1;
            return f.evaluate(&c.genes);
        }
        let key = c.key();
        if let Some(&v) = self.table.get(&key) {
            self.stats.hits += 1;
            return Ok(v);
        }
        let v = f.evaluate(&c.genes)?;
        self.stats.misses += 1;
        self.table.insert(key, v);
        Ok(v)
    }
}

pub fn fitness(c: &Chromosome, reference: &NetFlowFitness, cache: &mut FitnessCache) -> Result<f64> {
    cache.evaluate(reference, c)
}

fn sample_gene<R: Rng + ?Sized>(interval: &Interval, rng: &mut R) -> f64 {
    let u: f64 = rng.gen();
    (interval.lo + interval.width() * u).clamp(interval.lo, interval.hi)
}

/// Uniform draws per gene. A chromosome identical to one already drawn is
/// re-sampled up to `duplicate_rejection_attempts` times, then kept.
pub fn init_population<R: Rng + ?Sized>(
    cfg: &GaConfig,
    bounds: &GeneBounds,
    rng: &mut R,
) -> Result<Vec<Chromosome>> {
    if cfg.population_size == 0 {
        return Err(Error::EmptyPopulation);
    }
    let mut population: Vec<Chromosome> = Vec::with_capacity(cfg.population_size);
    let mut seen = std::collections::HashSet::new();
    while population.len() < cfg.population_size {
        let mut candidate = None;
        for _ in 0..cfg.duplicate_rejection_attempts.max(1) {
            let c = Chromosome::new(bounds.intervals().iter().map(|i| sample_gene(i, rng)).collect());
            let fresh = !seen.contains(&c.key());
            candidate = Some(c);
            if fresh {
                break;
            }
        }
        let c = candidate.expect("at least one attempt");
        seen.insert(c.key());
        population.push(c);
    }
    Ok(population)
}

/// Fitness-proportional sampling with replacement. Fitnesses are shifted by
/// their minimum plus `1e-6` of their range, so negative net flows still get
/// a positive slot; equal fitnesses give a uniform wheel.
pub fn select_roulette<R: Rng + ?Sized>(fitnesses: &[f64], count: usize, rng: &mut R) -> Result<Vec<usize>> {
    if fitnesses.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    if let Some(f) = fitnesses.iter().find(|f| !f.is_finite()) {
        return Err(Error::InvalidGaConfig(format!("non-finite fitness {f}")));
    }
    let min = fitnesses.iter().copied().fold(f64::INFINITY, f64::min);
    let max = fitnesses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    let slots: Vec<f64> = if range > 0.0 {
        let eps = 1e-6 * range;
        fitnesses.iter().map(|f| f - min + eps).collect()
    } else {
        vec![1.0; fitnesses.len()]
    };
    let total: f64 = slots.iter().sum();
    let mut picks = Vec::with_capacity(count);
    for _ in 0..count {
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut chosen = slots.len() - 1;
        for (i, s) in slots.iter().enumerate() {
            acc += s;
            if target < acc {
                chosen = i;
                break;
            }
        }
        picks.push(chosen);
    }
    Ok(picks)
}

/// Uniform crossover: with probability `rate`, each gene is swapped between
/// the parents on an independent fair coin.
pub fn crossover<R: Rng + ?Sized>(
    p1: &Chromosome,
    p2: &Chromosome,
    rate: f64,
    rng: &mut R,
) -> Result<(Chromosome, Chromosome)> {
    if p1.genes.len() != p2.genes.len() {
        return Err(Error::DimensionMismatch {
            expected: p1.genes.len(),
            found: p2.genes.len(),
        });
    }
    let mut c1 = p1.clone();
    let mut c2 = p2.clone();
    if rng.gen::<f64>() < rate {
        for (a, b) in c1.genes.iter_mut().zip(c2.genes.iter_mut()) {
            if rng.gen::<bool>() {
                std::mem::swap(a, b);
            }
        }
    }
    Ok((c1, c2))
}

/// Each gene is redrawn uniformly inside its bounds with probability `rate`.
pub fn mutate<R: Rng + ?Sized>(c: &Chromosome, rate: f64, bounds: &GeneBounds, rng: &mut R) -> Result<Chromosome> {
    if c.genes.len() != bounds.len() {
        return Err(Error::DimensionMismatch {
            expected: bounds.len(),
            found: c.genes.len(),
        });
    }
    let genes = c
        .genes
        .iter()
        .zip(bounds.intervals())
        .map(|(&g, interval)| {
            if rng.gen::<f64>() < rate {
                sample_gene(interval, rng)
            } else {
                g
            }
        })
        .collect();
    Ok(Chromosome::new(genes))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub best: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileValue {
    pub criterion: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaReport {
    pub best_chromosome: Chromosome,
    pub best_fitness: f64,
    pub history: Vec<GenerationStats>,
    /// Final population ranked by fitness.
    pub final_ranking: RankedOrder,
    pub best_profile: Vec<ProfileValue>,
    pub cache_stats: CacheStats,
}

/// Runs the search with net-flow fitness against `reference`.
pub fn run(cfg: &GaConfig, reference: &DecisionMatrix, bounds: &GeneBounds) -> Result<GaReport> {
    run_with(cfg, &NetFlowFitness::new(reference)?, bounds, &[])
}

struct Scored {
    chromosome: Chromosome,
    fitness: f64,
}

fn sort_by_fitness(pop: &mut [Scored]) {
    // Stable: equal fitnesses keep their prior order.
    pop.sort_by(|a, b| b.fitness.total_cmp(&a.fitness));
}

fn stats(generation: usize, pop: &[Scored]) -> GenerationStats {
    GenerationStats {
        generation,
        best: pop.iter().map(|s| s.fitness).fold(f64::NEG_INFINITY, f64::max),
        mean: pop.iter().map(|s| s.fitness).sum::<f64>() / pop.len() as f64,
    }
}

/// Generic driver. `seeded` chromosomes replace the head of the random
/// initial population.
pub fn run_with<F: Fitness + ?Sized>(
    cfg: &GaConfig,
    fitness: &F,
    bounds: &GeneBounds,
    seeded: &[Chromosome],
) -> Result<GaReport> {
    cfg.validate()?;
    if bounds.len() != fitness.gene_count() {
        return Err(Error::DimensionMismatch {
            expected: fitness.gene_count(),
            found: bounds.len(),
        });
    }
    if seeded.len() > cfg.population_size {
        return Err(Error::InvalidGaConfig(format!(
            "{} seeded chromosomes exceed population size {}",
            seeded.len(),
            cfg.population_size
        )));
    }
    if let Some(c) = seeded.iter().find(|c| !bounds.contains(c)) {
        return Err(Error::InvalidGaConfig(format!(
            "seeded chromosome {:?} lies outside the gene bounds",
            c.genes
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut cache = FitnessCache::new(cfg.use_cache);

    let mut initial = init_population(cfg, bounds, &mut rng)?;
    for (slot, c) in initial.iter_mut().zip(seeded) {
        *slot = c.clone();
    }
    let mut population = initial
        .into_iter()
        .map(|c| {
            let fitness = cache.evaluate(fitness, &c)?;
            Ok(Scored { chromosome: c, fitness })
        })
        .collect::<Result<Vec<_>>>()?;
    sort_by_fitness(&mut population);
    let mut history = vec![stats(0, &population)];

    let parents_needed = cfg.population_size + cfg.population_size % 2;
    for generation in 1..=cfg.generations {
        let scores: Vec<f64> = population.iter().map(|s| s.fitness).collect();
        let parents = select_roulette(&scores, parents_needed, &mut rng)?;

        let mut children = Vec::with_capacity(parents_needed);
        for pair in parents.chunks(2) {
            let (c1, c2) = crossover(
                &population[pair[0]].chromosome,
                &population[pair[1]].chromosome,
                cfg.crossover_rate,
                &mut rng,
            )?;
            children.push(c1);
            children.push(c2);
        }
        children.truncate(cfg.population_size);
        let children = children
            .iter()
            .map(|c| mutate(c, cfg.mutation_rate, bounds, &mut rng))
            .collect::<Result<Vec<_>>>()?;

        let mut next: Vec<Scored> = population.drain(..cfg.elitism_count).collect();
        for c in children {
            let f = cache.evaluate(fitness, &c)?;
            next.push(Scored { chromosome: c, fitness: f });
        }
        sort_by_fitness(&mut next);
        next.truncate(cfg.population_size);
        population = next;
        history.push(stats(generation, &population));
    }

    let best = &population[0];
    let width = cfg.population_size.to_string().len();
    let final_ranking = rank_by_score(
        population
            .iter()
            .enumerate()
            .map(|(i, s)| (format!("individual-{:0width$}", i + 1), s.fitness)),
    );
    let best_profile = fitness
        .gene_labels()
        .into_iter()
        .zip(&best.chromosome.genes)
        .map(|(criterion, &value)| ProfileValue { criterion, value })
        .collect();
    Ok(GaReport {
        best_chromosome: best.chromosome.clone(),
        best_fitness: best.fitness,
        history,
        final_ranking,
        best_profile,
        cache_stats: cache.stats(),
    })
}
