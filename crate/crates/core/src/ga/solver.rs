//! Population handling and the steady-state main loop.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{fitness, Chromosome};
use crate::ga::construct::random_solution;
use crate::ga::operators::{crossover1, crossover2, local_search_insert, mutate};
use crate::ga::params::{CrossoverKind, GaParams};
use crate::ga::repair::is_admissible;
use crate::instance::Instance;
use crate::patterns::PatternSet;

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub chromosome: Chromosome,
    pub fitness: f64,
    key: Vec<(u32, u32)>,
}

impl Member {
    pub fn new(chromosome: Chromosome, fitness: f64) -> Self {
        let key = chromosome.multiset_key();
        Member {
            chromosome,
            fitness,
            key,
        }
    }
}

/// Distinct feasible members, best first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Population {
    pub members: Vec<Member>,
}

impl Population {
    /// Best `cap` distinct candidates by fitness; ties keep arrival order.
    pub fn select(mut candidates: Vec<Member>, cap: usize) -> Self {
        candidates.sort_by(|a, b| a.fitness.total_cmp(&b.fitness));
        let mut members: Vec<Member> = Vec::with_capacity(cap);
        let mut keys = std::collections::HashSet::new();
        for c in candidates {
            if members.len() == cap {
                break;
            }
            if keys.insert(c.key.clone()) {
                members.push(c);
            }
        }
        Population { members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> Option<&Member> {
        self.members.first()
    }

    pub fn worst(&self) -> Option<&Member> {
        self.members.last()
    }

    pub fn mean_fitness(&self) -> f64 {
        if self.members.is_empty() {
            return 0.0;
        }
        self.members.iter().map(|m| m.fitness).sum::<f64>() / self.members.len() as f64
    }

    pub fn contains(&self, ch: &Chromosome) -> bool {
        let key = ch.multiset_key();
        self.members.iter().any(|m| m.key == key)
    }

    /// Admits `m` if it is distinct and either there is room or it beats the
    /// worst member, which is evicted.
    pub fn offer(&mut self, m: Member, cap: usize) -> bool {
        if self.members.iter().any(|x| x.key == m.key) {
            return false;
        }
        if self.members.len() >= cap {
            match self.worst() {
                Some(w) if m.fitness < w.fitness => {
                    self.members.pop();
                }
                _ => return false,
            }
        }
        let at = self.members.partition_point(|x| x.fitness <= m.fitness);
        self.members.insert(at, m);
        true
    }
}

fn member(ch: Chromosome, inst: &Instance, pats: &PatternSet) -> Option<Member> {
    let f = fitness(&ch, inst, pats).ok()?;
    Some(Member::new(ch, f))
}

fn draw(n: usize, inst: &Instance, pats: &PatternSet, rng: &mut ChaCha8Rng) -> Vec<Member> {
    (0..n)
        .filter_map(|_| random_solution(inst, pats, rng))
        .filter_map(|ch| member(ch, inst, pats))
        .collect()
}

/// Draws `construction_pool` constructions and keeps the best distinct ones.
pub fn init_population(
    params: &GaParams,
    inst: &Instance,
    pats: &PatternSet,
    rng: &mut ChaCha8Rng,
) -> Result<Population> {
    let pop = Population::select(
        draw(params.construction_pool, inst, pats, rng),
        params.population_size,
    );
    if pop.is_empty() {
        return Err(Error::InfeasibleInstance);
    }
    Ok(pop)
}

/// One line of the convergence trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub generation: u64,
    pub best_fitness: f64,
    pub mean_fitness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaOutcome {
    pub best: Chromosome,
    pub fitness: f64,
    pub trace: Vec<TracePoint>,
    pub restarts: u64,
}

impl GaOutcome {
    /// `generation,best_fitness,mean_fitness` lines with a header.
    pub fn trace_csv(&self) -> String {
        let mut s = String::from("generation,best_fitness,mean_fitness\n");
        for p in &self.trace {
            s.push_str(&format!(
                "{},{:.2},{:.4}\n",
                p.generation, p.best_fitness, p.mean_fitness
            ));
        }
        s
    }
}

/// Runs the genetic algorithm. Deterministic for a given seed.
pub fn run(inst: &Instance, pats: &PatternSet, params: &GaParams) -> Result<GaOutcome> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let cap = params.population_size;
    let mut pop = init_population(params, inst, pats, &mut rng)?;
    let mut best = pop.best().cloned().expect("population is nonempty");
    let mut trace = vec![TracePoint {
        generation: 0,
        best_fitness: best.fitness,
        mean_fitness: pop.mean_fitness(),
    }];
    let mut stale = 0u64;
    let mut restarts = 0u64;

    for generation in 1..=params.generations {
        if pop.len() >= 2 {
            let i = rng.gen_range(0..pop.len());
            let mut j = rng.gen_range(0..pop.len() - 1);
            if j >= i {
                j += 1;
            }
            let (a, b) = (&pop.members[i].chromosome, &pop.members[j].chromosome);
            let mut child = match params.crossover {
                CrossoverKind::Mean => crossover1(a, b, params.mutation_rate, inst, pats, &mut rng),
                CrossoverKind::Coin => crossover2(a, b, inst, pats, &mut rng),
            };
            if rng.gen_bool(params.mutation_rate) {
                if let Some(c) = &child {
                    child = mutate(c, inst, pats, &mut rng).ok().flatten();
                }
            }
            if let Some(m) = child
                .filter(|c| is_admissible(c, inst, pats))
                .and_then(|c| member(c, inst, pats))
            {
                pop.offer(m, cap);
            }
        }

        let head = pop.best().expect("population is nonempty");
        if head.fitness < best.fitness {
            best = head.clone();
            stale = 0;
        } else {
            stale += 1;
        }

        if params.restart_patience > 0 && stale >= params.restart_patience {
            let mut pool: Vec<Member> = pop
                .members
                .iter()
                .take(params.restart_elites)
                .cloned()
                .collect();
            pool.extend(draw(params.construction_pool, inst, pats, &mut rng));
            pop = Population::select(pool, cap);
            stale = 0;
            restarts += 1;
        }

        trace.push(TracePoint {
            generation,
            best_fitness: best.fitness,
            mean_fitness: pop.mean_fitness(),
        });
    }

    let mut finals: Vec<Member> = pop.members.clone();
    finals.push(best);
    let mut winner: Option<Member> = None;
    for m in finals {
        let ch = local_search_insert(&m.chromosome, inst, pats);
        let Some(cand) = member(ch, inst, pats) else {
            continue;
        };
        if winner.as_ref().is_none_or(|w| cand.fitness < w.fitness) {
            winner = Some(cand);
        }
    }
    let winner = winner.expect("final members evaluate");
    Ok(GaOutcome {
        best: winner.chromosome,
        fitness: winner.fitness,
        trace,
        restarts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::classify_infeasibility;
    use crate::reference::cwp000;

    fn quick(seed: u64) -> GaParams {
        let mut p = GaParams::defaults(6, seed);
        p.generations = 300;
        p.restart_patience = 60;
        p.construction_pool = 60;
        p
    }

    #[test]
    fn population_is_sorted_and_distinct() {
        let inst = cwp000();
        let pats = PatternSet::enumerate(&inst);
        let p = GaParams::defaults(pats.num_packing(), 4);
        let pop = init_population(&p, &inst, &pats, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        assert!(pop.len() <= 25 && !pop.is_empty());
        for w in pop.members.windows(2) {
            assert!(w[0].fitness <= w[1].fitness);
            assert!(!w[0].chromosome.same_multiset(&w[1].chromosome));
        }
        for m in &pop.members {
            assert!(is_admissible(&m.chromosome, &inst, &pats));
        }
    }

    #[test]
    fn offer_replaces_worst_only_when_better() {
        let mk = |p: u32, f: f64| Member::new(Chromosome::from_pairs([(p, 1)]), f);
        let mut pop = Population::select(vec![mk(1, 3.0), mk(2, 1.0)], 2);
        assert!(!pop.offer(mk(3, 4.0), 2));
        assert!(!pop.offer(mk(1, 0.5), 2));
        assert!(pop.offer(mk(3, 2.0), 2));
        let f: Vec<f64> = pop.members.iter().map(|m| m.fitness).collect();
        assert_eq!(f, vec![1.0, 2.0]);
    }

    #[test]
    fn trace_is_nonincreasing_and_deterministic() {
        let inst = cwp000();
        let pats = PatternSet::enumerate(&inst);
        let a = run(&inst, &pats, &quick(9)).unwrap();
        let b = run(&inst, &pats, &quick(9)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trace.len(), 301);
        for w in a.trace.windows(2) {
            assert!(w[1].best_fitness <= w[0].best_fitness);
        }
        assert!(classify_infeasibility(&a.best, &inst, &pats)
            .unwrap()
            .is_feasible());
        assert!(a.fitness <= a.trace.last().unwrap().best_fitness);
    }

    #[test]
    fn zero_generations() {
        let inst = cwp000();
        let pats = PatternSet::enumerate(&inst);
        let mut p = quick(2);
        p.generations = 0;
        let out = run(&inst, &pats, &p).unwrap();
        assert_eq!(out.trace.len(), 1);
        assert!(out.fitness <= out.trace[0].best_fitness);
    }

    #[test]
    fn no_stock_is_infeasible() {
        let mut inst = cwp000();
        inst.stock = vec![0; 5];
        let pats = PatternSet::enumerate(&inst);
        assert!(matches!(
            run(&inst, &pats, &quick(1)),
            Err(Error::InfeasibleInstance)
        ));
    }
}
