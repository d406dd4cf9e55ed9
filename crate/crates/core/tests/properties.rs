mod support;

use csp_blp::blp::{check_marginals, rescale_denominator, solve_blp, verify_loss_identity, vcsp_to_mincsp};
use csp_blp::csp::{all_tuples, brute_force_opt, evaluate, Assignment, Domain, Relation};
use csp_blp::gadgets::{
    hypergraph_gadget, induced_set, preset_language, random_hypergraph, random_instance,
    random_satisfiable_instance, Preset, WeightRange,
};
use csp_blp::io::{instance_from_json, instance_to_json};
use csp_blp::polylab::{
    classify_operation, dist, enumerate_symmetric_polymorphisms, is_polymorphism, multisets, pp_evaluate, Atom,
    AtomRelation, Multiset, Operation, PPFormula, SymmetricOperation,
};
use csp_blp::rounding::{
    g_hn_table, lattice_round, round_symmetric, three_element_round, Lattice, Mode,
};
use csp_blp::{Caps, Instance, Language, Rational};
use proptest::prelude::*;
use support::{q, random_valued_instance};

fn preset_strategy() -> impl Strategy<Value = Preset> {
    prop_oneof![
        Just(Preset::HornSat { k: 3 }),
        Just(Preset::Ihbs { k: 3 }),
        Just(Preset::MinUncut),
        Just(Preset::Min2Cnf),
        Just(Preset::RPlusMinus),
        Just(Preset::PowersetLattice { s: 2 }),
    ]
}

fn small_instance(preset: Preset, seed: u64, vars: usize, cons: usize) -> Instance {
    let lang: Language = preset_language(preset).unwrap();
    random_instance(&lang, vars.max(lang.max_arity()), cons, WeightRange::default(), seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn blp_is_a_consistent_lower_bound(preset in preset_strategy(), seed in any::<u64>(), vars in 1usize..6, cons in 0usize..8) {
        let inst = small_instance(preset, seed, vars, cons);
        let sol = solve_blp(&inst).unwrap();
        prop_assert!(check_marginals(&inst, &sol));
        let opt = brute_force_opt(&inst, 1 << 20).unwrap();
        prop_assert!(sol.value <= opt.value);
        prop_assert!(verify_loss_identity(&inst, &sol).unwrap().all_pass());
        for v in 0..inst.num_vars() {
            prop_assert_eq!(sol.counts(v).iter().sum::<u64>(), sol.denominator);
        }
    }

    #[test]
    fn rescaling_preserves_integrality(preset in preset_strategy(), seed in any::<u64>(), target in 1u64..40) {
        let inst = small_instance(preset, seed, 4, 5);
        let sol = rescale_denominator(&solve_blp(&inst).unwrap(), target).unwrap();
        prop_assert!(sol.denominator >= target);
        for v in 0..inst.num_vars() {
            prop_assert_eq!(sol.counts(v).iter().sum::<u64>(), sol.denominator);
        }
    }

    #[test]
    fn serialization_round_trips(preset in preset_strategy(), seed in any::<u64>()) {
        let inst = small_instance(preset, seed, 5, 6);
        let text = instance_to_json(&inst);
        let back: Instance = instance_from_json(&text).unwrap();
        prop_assert_eq!(instance_to_json(&back), text);
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn vcsp_sandwich(seed in any::<u64>(), labels in proptest::collection::vec(0usize..3, 5)) {
        let inst = random_valued_instance(seed);
        let (crisp, m) = vcsp_to_mincsp(&inst).unwrap();
        let d = inst.domain().size();
        let s = Assignment(labels.iter().take(inst.num_vars()).map(|&a| a % d).collect());
        let v1 = inst.value(&s).unwrap();
        let v2 = crisp.value(&s).unwrap();
        prop_assert!(v1 <= v2);
        prop_assert!(v2 <= &v1 / &m);
    }

    #[test]
    fn dist_is_a_metric(d in 1usize..4, n in 1usize..6, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), k in any::<prop::sample::Index>()) {
        let all: Vec<Multiset> = multisets(d, n).collect();
        let (a, b, c) = (i.get(&all), j.get(&all), k.get(&all));
        let ab: Rational = dist(a, b).unwrap();
        prop_assert_eq!(ab.clone(), dist(b, a).unwrap());
        prop_assert_eq!(ab == q(0, 1), a == b);
        prop_assert!(ab <= dist::<Rational>(a, c).unwrap() + dist::<Rational>(c, b).unwrap());
    }

    #[test]
    fn symmetric_ops_ignore_argument_order(seed in any::<u64>(), d in 2usize..4, n in 1usize..5, args in proptest::collection::vec(0usize..3, 4)) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = SymmetricOperation::from_fn(d, n, 1 << 20, |_| rng.gen_range(0..d)).unwrap();
        let mut t: Vec<usize> = args.iter().take(n).map(|&a| a % d).collect();
        t.resize(n, 0);
        let before = g.apply(&t);
        t.reverse();
        prop_assert_eq!(before, g.apply(&t));
        t.rotate_left(1);
        prop_assert_eq!(before, g.apply(&t));
    }

    #[test]
    fn derandomized_is_at_most_mean(seed in any::<u64>(), vars in 3usize..6, cons in 1usize..8, scale in 3u64..12) {
        let lang: Language = preset_language(Preset::RPlusMinus).unwrap();
        let inst = random_instance(&lang, vars, cons, WeightRange::default(), seed).unwrap();
        let sol = rescale_denominator(&solve_blp(&inst).unwrap(), scale).unwrap();
        let r = three_element_round(&inst, &sol, Mode::Derandomized).unwrap();
        prop_assert!(r.value <= r.mean_value);
        prop_assert_eq!(r.value.clone(), inst.value(&r.assignment).unwrap());
        prop_assert!(r.blp_value <= r.value);
    }

    #[test]
    fn lattice_rounding_of_satisfiable_instances(seed in any::<u64>(), vars in 2usize..6, cons in 1usize..8) {
        let lang: Language = preset_language(Preset::PowersetLattice { s: 1 }).unwrap();
        let lattice = Lattice::powerset(1).unwrap();
        let (inst, _) = random_satisfiable_instance(&lang, vars, cons, WeightRange::default(), seed).unwrap();
        let sol = rescale_denominator(&solve_blp(&inst).unwrap(), 4).unwrap();
        prop_assert_eq!(sol.value.clone(), q(0, 1));
        let r = lattice_round(&inst, &sol, &lattice, Mode::Derandomized).unwrap();
        prop_assert_eq!(r.value, q(0, 1));
    }

    #[test]
    fn enumerated_polymorphisms_round_to_zero(seed in any::<u64>(), vars in 3usize..6, cons in 1usize..6) {
        let lang: Language = preset_language(Preset::HornSat { k: 3 }).unwrap();
        let (inst, _) = random_satisfiable_instance(&lang, vars, cons, WeightRange::default(), seed).unwrap();
        let sol = solve_blp(&inst).unwrap();
        prop_assert_eq!(sol.value.clone(), q(0, 1));
        let n = sol.denominator as usize;
        for g in enumerate_symmetric_polymorphisms(&lang, n, &Caps::default()).unwrap() {
            let s = round_symmetric(&sol, &g).unwrap();
            prop_assert_eq!(inst.value(&s).unwrap(), q(0, 1));
        }
    }

    #[test]
    fn gadget_feasible_assignments_give_independent_sets(v in 3usize..6, seed in any::<u64>()) {
        let or3 = Relation::from_predicate(2, 3, |t| t.contains(&1)).unwrap();
        let h = random_hypergraph(v, 3, 1, 2, seed).unwrap();
        let inst = hypergraph_gadget::<Rational>(&h, &or3, 0, 1, None, 1000).unwrap();
        for s in all_tuples(2, v) {
            let s = Assignment(s);
            if evaluate(&inst, &s, false).unwrap().is_feasible() {
                prop_assert!(h.is_independent(&induced_set(&s, v, 0)));
            }
        }
    }

    #[test]
    fn pp_renaming_invariance(perm_seed in 0usize..6) {
        let neq = Relation::from_predicate(3, 2, |t| t[0] != t[1]).unwrap();
        let lang = Language::new(Domain::new(3).unwrap(), vec![neq.into()]).unwrap();
        let perms = [[2, 3, 4], [2, 4, 3], [3, 2, 4], [3, 4, 2], [4, 2, 3], [4, 3, 2]];
        let p = perms[perm_seed];
        let atoms = |b: [usize; 3]| vec![
            Atom { relation: AtomRelation::Member(0), vars: vec![0, b[0]] },
            Atom { relation: AtomRelation::Member(0), vars: vec![b[0], b[1]] },
            Atom { relation: AtomRelation::Equality, vars: vec![b[1], b[2]] },
            Atom { relation: AtomRelation::Member(0), vars: vec![b[2], 1] },
        ];
        let f = PPFormula::new(2, 3, atoms([2, 3, 4])).unwrap();
        let g = PPFormula::new(2, 3, atoms(p)).unwrap();
        prop_assert_eq!(pp_evaluate(&f, &lang, 1 << 20).unwrap(), pp_evaluate(&g, &lang, 1 << 20).unwrap());
    }
}

#[test]
fn enumerated_polymorphisms_are_symmetric_polymorphisms() {
    for preset in [Preset::HornSat { k: 3 }, Preset::Min2Cnf, Preset::RPlusMinus, Preset::MinUncut] {
        let lang: Language = preset_language(preset).unwrap();
        for n in 1..=3 {
            for g in enumerate_symmetric_polymorphisms(&lang, n, &Caps::default()).unwrap() {
                assert!(is_polymorphism(&g, &lang, 1 << 20).unwrap());
                let full = g.to_general(1 << 20).unwrap();
                assert!(classify_operation(&full).symmetric);
                assert!(is_polymorphism(&full, &lang, 1 << 20).unwrap());
            }
        }
    }
}

#[test]
fn lattice_family_is_polymorphic_for_every_admissible_h() {
    let lattice = Lattice::powerset(2).unwrap();
    let lang: Language = preset_language(Preset::PowersetLattice { s: 2 }).unwrap();
    for n in 1..=6 {
        // every h above n/2 preserves the negative-pair relations
        for h in (n / 2 + 1)..=n {
            let g = g_hn_table(&lattice, h, n, 1 << 24).unwrap();
            assert!(is_polymorphism(&g, &lang, 1 << 24).unwrap(), "h = {h}, n = {n}");
        }
    }
}

#[test]
fn mixed_instances_without_feasible_assignments() {
    let mut b = Instance::builder(Domain::new(2).unwrap(), 1);
    let zero = b.payload(Relation::singleton(2, 0).unwrap());
    let one = b.payload(Relation::singleton(2, 1).unwrap());
    b.hard(vec![0], zero).hard(vec![0], one);
    let inst = b.build().unwrap();
    assert!(brute_force_opt(&inst, 100).is_err());
    assert!(solve_blp(&inst).is_err());
}
