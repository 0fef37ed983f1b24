//! The exhaustive invariant suites behind `qstable selftest`: one line per
//! suite, failure aborts with a nonzero exit.

use qstable::cubecomplex::enumerate_cells;
use qstable::qcond::{count_conditions_forced, enumerate_conditions};
use qstable::tropical::{enumerate_chains, enumerate_test_curves, CoreKind};
use qstable::uradius::UniversalRadius;
use qstable::{enumerate_partitions, QCondition};

pub fn run(n: usize) -> Result<(), String> {
    if n == 0 || n > 5 {
        return Err(format!("selftest supports 1 <= n <= 5, got {n}"));
    }
    let mut failures = 0usize;
    let mut suite = |name: &str, result: Result<String, String>| match result {
        Ok(detail) => println!("ok   {name}: {detail}"),
        Err(e) => {
            failures += 1;
            println!("FAIL {name}: {e}");
        }
    };

    suite("partition order", partition_order(n));
    if n <= 4 {
        suite("antichain duality", antichain_duality(n));
        suite("condition counting", counting(n));
        suite("cube vertices", cube_vertices(n));
    }
    if n <= 4 {
        suite("partition-type round trip", chain_round_trip(n));
    }
    let sweep_n = n.min(3);
    suite("radius compatibility", radius_compatibility(sweep_n));
    suite("exactly-one contraction", exactly_one(sweep_n));
    suite("pipeline stability", pipeline(sweep_n));

    if failures > 0 {
        Err(format!("{failures} suite(s) failed"))
    } else {
        Ok(())
    }
}

fn partition_order(n: usize) -> Result<String, String> {
    let all = enumerate_partitions(n).map_err(|e| e.to_string())?;
    for a in &all {
        if !a.refined_by(a) {
            return Err(format!("not reflexive at {a}"));
        }
    }
    for a in &all {
        for b in &all {
            if a.refined_by(b) && b.refined_by(a) && a != b {
                return Err(format!("not antisymmetric at {a}, {b}"));
            }
            for c in &all {
                if a.refined_by(b) && b.refined_by(c) && !a.refined_by(c) {
                    return Err(format!("not transitive at {a}, {b}, {c}"));
                }
            }
        }
    }
    Ok(format!("{} partitions", all.len()))
}

fn antichain_duality(n: usize) -> Result<String, String> {
    let conditions = enumerate_conditions(n).map_err(|e| e.to_string())?;
    for q in &conditions {
        let back = QCondition::from_antichain(&q.to_antichain());
        if &back != q {
            return Err(format!("round trip failed for {q:?}"));
        }
    }
    Ok(format!("{} conditions", conditions.len()))
}

fn counting(n: usize) -> Result<String, String> {
    let enumerated = enumerate_conditions(n).map_err(|e| e.to_string())?.len() as u64;
    let counted = count_conditions_forced(n, Some(1)).map_err(|e| e.to_string())?;
    if enumerated != counted {
        return Err(format!(
            "counter says {counted}, enumeration says {enumerated}"
        ));
    }
    Ok(format!("{counted}"))
}

fn cube_vertices(n: usize) -> Result<String, String> {
    let cells = enumerate_cells(n).map_err(|e| e.to_string())?;
    let vertices = cells.iter().filter(|c| c.dimension() == 0).count() as u64;
    let conditions = count_conditions_forced(n, Some(1)).map_err(|e| e.to_string())?;
    if vertices != conditions {
        return Err(format!("{vertices} vertices vs {conditions} conditions"));
    }
    Ok(format!("{vertices} vertices"))
}

fn chain_round_trip(n: usize) -> Result<String, String> {
    let chains = enumerate_chains(n, false).map_err(|e| e.to_string())?;
    for chain in &chains {
        let curve =
            qstable::build_test_curve(chain, CoreKind::SmoothVertex).map_err(|e| e.to_string())?;
        let back = curve.partition_type().map_err(|e| e.to_string())?;
        if &back != chain {
            return Err(format!("chain {chain} came back as {back}"));
        }
    }
    Ok(format!("{} chains", chains.len()))
}

fn radius_compatibility(n: usize) -> Result<String, String> {
    let curves = enumerate_test_curves(n).map_err(|e| e.to_string())?;
    let conditions = enumerate_conditions(n).map_err(|e| e.to_string())?;
    let mut checked = 0usize;
    for q in &conditions {
        let u = UniversalRadius::from_condition(q.clone());
        for c in &curves {
            if !u.compatible_on(c).map_err(|e| e.to_string())? {
                return Err(format!("incompatible radius for {q:?} on {c:?}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs"))
}

fn exactly_one(n: usize) -> Result<String, String> {
    let chains = enumerate_chains(n, false).map_err(|e| e.to_string())?;
    let conditions = enumerate_conditions(n).map_err(|e| e.to_string())?;
    let mut checked = 0usize;
    for chain in &chains {
        for q in &conditions {
            qstable::verify_exactly_one(chain, CoreKind::SmoothVertex, q)
                .map_err(|e| e.to_string())?;
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs"))
}

fn pipeline(n: usize) -> Result<String, String> {
    let curves = enumerate_test_curves(n).map_err(|e| e.to_string())?;
    let conditions = enumerate_conditions(n).map_err(|e| e.to_string())?;
    let mut checked = 0usize;
    for c in &curves {
        for q in &conditions {
            // errors when the output is not stable for q
            qstable::contract_for_condition(c, q).map_err(|e| e.to_string())?;
            checked += 1;
        }
    }
    Ok(format!("{checked} contractions"))
}
