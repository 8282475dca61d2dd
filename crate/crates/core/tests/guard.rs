mod common;

use common::mutation::mutation_suite;
use dtac_core::guard::{check_guard, ViolationKind};
use dtac_core::parser::parse_program;

#[test]
fn mutation_suite_sorts_edits() {
    let t = mutation_suite(500, 99).unwrap();
    assert!(t.legal_accepted >= 500 && t.illegal_rejected >= 500);
}

#[test]
fn conj_split_result_is_accepted() {
    let before = "predicate A() predicate B() public method MainGoal() ensures A() && B() { }";
    let after = "predicate A() predicate B()
        /*generated*/ ghost method SubGoalA() ensures A() { }
        /*generated*/ ghost method SubGoalB() ensures B() { }
        public method MainGoal() ensures A() && B() { SubGoalA(); SubGoalB(); }";
    let r = check_guard(&parse_program(before).unwrap(), &parse_program(after).unwrap());
    assert!(r.ok(), "{r}");
}

#[test]
fn compiled_function_edit_is_caught() {
    let a = parse_program("function method f(x: int): int { x + 1 } method m() { }").unwrap();
    let b = parse_program("function method f(x: int): int { x + 2 } method m() { }").unwrap();
    assert_eq!(check_guard(&a, &b).kinds(), vec![ViolationKind::CodeChanged]);
    let c = parse_program("function f(x: int): int { x + 2 } method m() { }").unwrap();
    let d = parse_program("function f(x: int): int { x + 3 } method m() { }").unwrap();
    assert!(check_guard(&c, &d).ok());
}
