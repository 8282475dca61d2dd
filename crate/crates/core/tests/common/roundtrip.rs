use dtac_core::gen::Gen;
use dtac_core::parser::parse_program;
use dtac_core::printer::print_program;
use dtac_core::stdlib::STDLIB_SOURCE;
use dtac_core::tactic::{parse_tactic_defs, print_defs};

/// parse(print(p)) == p for `n` generated programs.
pub fn programs(n: u64, seed: u64) -> Result<u64, String> {
    let mut g = Gen::new(seed);
    for i in 0..n {
        let p = g.program();
        let text = print_program(&p);
        let q = parse_program(&text).map_err(|e| format!("program {i}: {e}\n{text}"))?;
        if q != p {
            return Err(format!("program {i} changed on re-parse:\n{text}"));
        }
    }
    Ok(n)
}

/// The stdlib source survives print∘parse of its definitions.
pub fn stdlib_source() -> Result<usize, String> {
    let defs = parse_tactic_defs(STDLIB_SOURCE).map_err(|e| e.to_string())?;
    let again = parse_tactic_defs(&print_defs(&defs)).map_err(|e| e.to_string())?;
    if again != defs {
        return Err("stdlib definitions changed on re-parse".into());
    }
    Ok(defs.len())
}
