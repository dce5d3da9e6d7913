use beamforge_core::eval::{classify_infeasibility, decoded_makespan};
use beamforge_core::ga::{crossover1_raw, is_admissible, random_solution, repair};
use beamforge_core::{
    fitness, generate_instance, lower_bound, validate_instance, Chromosome, Gene, Instance,
    PatternId, PatternSet,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance() -> impl Strategy<Value = Instance> {
    (any::<u64>(), 1usize..=2, 1usize..=6)
        .prop_map(|(seed, types, molds)| generate_instance(seed, types, molds).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_instances_validate(inst in instance()) {
        prop_assert!(validate_instance(&inst).is_empty());
        let back = Instance::parse(&inst.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), inst.to_json());
    }

    #[test]
    fn patterns_fit_their_bars(inst in instance()) {
        let pats = PatternSet::enumerate(&inst);
        for p in &pats.packing {
            let mold = inst.distinct_mold_lengths()[p.mold_class];
            prop_assert!(p.used_capacity <= mold);
            prop_assert!(p.counts.iter().any(|&a| a > 0));
        }
        for h in &pats.cutting {
            prop_assert!(h.waste.cm() >= 0);
            prop_assert!(h.waste < inst.bar_lengths[h.source_bar]);
        }
        for o in &pats.overlapping {
            prop_assert_eq!(o.leftover_counts.iter().sum::<u32>(), 2);
            prop_assert!(o.waste >= inst.overlap_loss);
        }
    }

    #[test]
    fn constructions_sit_above_the_bound(inst in instance(), seed in any::<u64>()) {
        let pats = PatternSet::enumerate(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lb = lower_bound(&inst, &pats).map(|b| b.total);
        for _ in 0..20 {
            if let Some(ch) = random_solution(&inst, &pats, &mut rng) {
                prop_assert!(classify_infeasibility(&ch, &inst, &pats).unwrap().is_feasible());
                prop_assert!(decoded_makespan(&ch, &inst, &pats).is_some());
                if let Ok(lb) = lb {
                    prop_assert!(fitness(&ch, &inst, &pats).unwrap() + 1e-9 >= lb);
                }
            }
        }
    }

    #[test]
    fn repair_output_is_feasible_and_stable(
        inst in instance(),
        seed in any::<u64>(),
        edits in proptest::collection::vec((any::<prop::sample::Index>(), 0u32..8), 1..4),
    ) {
        let pats = PatternSet::enumerate(&inst);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let Some(mut ch) = (0..50).find_map(|_| random_solution(&inst, &pats, &mut rng)) else {
            return Ok(());
        };
        for (idx, f) in edits {
            let id = PatternId(idx.index(pats.len()) as u32 + 1);
            ch.set_freq(id, f);
        }
        if let Some(fixed) = repair(&ch, &inst, &pats) {
            prop_assert!(is_admissible(&fixed, &inst, &pats));
            prop_assert_eq!(repair(&fixed, &inst, &pats), Some(fixed));
        }
    }

    #[test]
    fn mean_crossover_rounds_up(fa in proptest::collection::vec(0u32..20, 1..6), fb in proptest::collection::vec(0u32..20, 1..6)) {
        let mk = |fs: &[u32], off: u32| Chromosome::new(
            fs.iter().enumerate().filter(|(_, &f)| f > 0).map(|(i, &f)| Gene { pattern: PatternId(i as u32 + off), freq: f }).collect(),
        );
        let a = mk(&fa, 1);
        let b = mk(&fb, 1);
        let c = crossover1_raw(&a, &b, 0.0, &mut ChaCha8Rng::seed_from_u64(0));
        for g in &c.genes {
            prop_assert_eq!(g.freq, (a.freq(g.pattern) + b.freq(g.pattern)).div_ceil(2));
        }
        for g in a.genes.iter().chain(&b.genes) {
            prop_assert!(c.contains(g.pattern));
        }
    }
}
