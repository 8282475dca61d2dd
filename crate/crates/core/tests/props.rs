use dtac_core::gen::{invocation, mutate, EditKind, Gen};
use dtac_core::guard::check_guard;
use dtac_core::parser::parse_program;
use dtac_core::printer::print_program;
use dtac_core::tactic::parse_invocation;
use dtac_core::typecheck::typecheck;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn printing_is_idempotent(seed in any::<u64>()) {
        let p = Gen::new(seed).program();
        let once = print_program(&p);
        let q = parse_program(&once).unwrap();
        prop_assert_eq!(&q, &p);
        prop_assert_eq!(print_program(&q), once);
    }

    #[test]
    fn generated_programs_typecheck(seed in any::<u64>()) {
        let p = Gen::new(seed).program();
        let errs = typecheck(&p);
        prop_assert!(errs.is_empty(), "{:?}", errs);
    }

    #[test]
    fn guard_is_reflexive_and_accepts_legal_edits(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let p = g.program();
        prop_assert!(check_guard(&p, &p).ok());
        if let Some(q) = mutate(&mut g, &p, EditKind::Legal) {
            let r = check_guard(&p, &q);
            prop_assert!(r.ok(), "{}", r);
        }
    }

    #[test]
    fn generated_invocations_parse(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let p = g.program();
        let inv = invocation(&mut g, &p);
        prop_assert!(parse_invocation(&inv).is_ok(), "{}", inv);
    }
}
