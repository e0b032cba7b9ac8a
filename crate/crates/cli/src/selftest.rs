use std::io::Write;

use torsion_core::cohomology::{stabilized_h1, Method, OracleConfig};
use torsion_core::ext::{build_extension, ExtensionSpec};
use torsion_core::field::{field_make, primitive_root_of_unity};
use torsion_core::sen::{example_closed_form, kock_transform, sen_i_function, sen_partition};

type Check = (&'static str, fn() -> Result<(), String>);

fn expect<T: PartialEq + std::fmt::Debug>(got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("got {got:?}, expected {want:?}"))
    }
}

fn oracle(p: u64, d: u64, m: Option<u64>, method: Method) -> Result<Vec<usize>, String> {
    let spec = ExtensionSpec::new(p, d, m).map_err(|e| e.to_string())?;
    let ext = build_extension(spec).map_err(|e| e.to_string())?;
    let config = OracleConfig {
        method,
        ..OracleConfig::default()
    };
    stabilized_h1(&ext, &config)
        .map(|s| s.result.partition)
        .map_err(|e| e.to_string())
}

const CHECKS: &[Check] = &[
    ("field_make", || {
        let f = field_make(2, 3).map_err(|e| e.to_string())?;
        expect(f.order(), 4)
    }),
    ("root_of_unity", || {
        let f = field_make(7, 3).map_err(|e| e.to_string())?;
        let z = primitive_root_of_unity(&f, 3).map_err(|e| e.to_string())?;
        expect(z.value(), 2)
    }),
    ("uniformizer", || {
        let ext = build_extension(ExtensionSpec::new(3, 1, Some(4)).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        expect(ext.uniformizer_exponents(), (3, 2))
    }),
    ("ramification_profile", || {
        let ext = build_extension(ExtensionSpec::new(5, 1, Some(3)).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let prof = ext.ramification_profile().map_err(|e| e.to_string())?;
        expect(prof.i_table, vec![3; 4])
    }),
    ("i_function", || {
        expect(sen_i_function(2, 2, &[1, 3]).map_err(|e| e.to_string())?, vec![1, 3, 1])
    }),
    ("sen_partition", || {
        expect(
            sen_partition(3, 1, 1, &[4]).map_err(|e| e.to_string())?.lengths,
            vec![2, 1],
        )
    }),
    ("kock_transform", || {
        expect(
            kock_transform(2, 1, 3, &[3]).map_err(|e| e.to_string())?.lengths,
            vec![1],
        )
    }),
    ("oracle_p2_m1", || expect(oracle(2, 1, Some(1), Method::Cocycle)?, vec![1])),
    ("oracle_p3_m4", || expect(oracle(3, 1, Some(4), Method::Cocycle)?, vec![2, 1])),
    ("oracle_cyclic_path", || expect(oracle(3, 1, Some(4), Method::Cyclic)?, vec![2, 1])),
    ("oracle_subgroup_path", || {
        expect(
            oracle(2, 3, Some(3), Method::Subgroup)?,
            oracle(2, 3, Some(3), Method::Cocycle)?,
        )
    }),
    ("oracle_tame", || expect(oracle(7, 3, None, Method::Cocycle)?, vec![])),
    ("worked_example", || {
        let c = example_closed_form(2, 1).map_err(|e| e.to_string())?;
        expect((c.displayed, c.formula, c.agree), (vec![], vec![1], false))
    }),
];

/// Prints one line per check; returns whether all passed.
pub fn run(out: &mut impl Write, json: bool) -> bool {
    let mut all = true;
    for (name, check) in CHECKS {
        let result = check();
        all &= result.is_ok();
        let line = if json {
            serde_json::json!({
                "check": name,
                "pass": result.is_ok(),
                "detail": result.as_ref().err(),
            })
            .to_string()
        } else {
            match &result {
                Ok(()) => format!("ok   {name}"),
                Err(e) => format!("FAIL {name}: {e}"),
            }
        };
        if writeln!(out, "{line}").is_err() {
            return false;
        }
    }
    all
}
