mod common;

use dtac_core::gen::Gen;
use dtac_core::printer::print_program;
use dtac_core::typecheck::typecheck;

#[test]
fn generated_programs_round_trip() {
    assert_eq!(common::roundtrip::programs(10_000, 7), Ok(10_000));
}

#[test]
fn generated_programs_typecheck() {
    let mut g = Gen::new(11);
    for i in 0..1000 {
        let p = g.program();
        let errs = typecheck(&p);
        assert!(errs.is_empty(), "program {i}: {:?}\n{}", errs, print_program(&p));
    }
}

#[test]
fn stdlib_round_trips() {
    assert_eq!(common::roundtrip::stdlib_source(), Ok(27));
}
