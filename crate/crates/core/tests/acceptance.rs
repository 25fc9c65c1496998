//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the lines are always printed; exits non-zero on any failure.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rd_pivot::analysis::{self, MobilityVerdict, ModuleReason};
use rd_pivot::gadgets;
use rd_pivot::planar;
use rd_pivot::search::{self, Outcome, SearchLimits, SearchOptions};
use rd_pivot::{Catalog, Configuration, MoveModel, Position, Rules};

use common::*;

/// Wall-clock bounds.
const SUPER_RIGID_BUDGET: Duration = Duration::from_secs(1);
const COMPONENT_BUDGET: Duration = Duration::from_secs(1);
const CAPPED_ROOF_BUDGET: Duration = Duration::from_secs(10);

const ORACLE_SAMPLES: usize = 500;
const ORACLE_MAX_MODULES: usize = 10;
const REVERSAL_SAMPLES: usize = 1000;
const SUPERSET_SAMPLES: usize = 1000;
const SUPERSET_MAX_EXTRA: usize = 15;
const CONFINEMENT_DEPTH: usize = 5;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn rules(model: MoveModel) -> Rules<'static> {
    Catalog::shipped().rules(model)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn criterion_1() -> Check {
    let g = gadgets::super_rigid_config();
    let labels = gadgets::super_rigid_labels();
    let mut notes = Vec::new();
    for model in MoveModel::ALL {
        let start = Instant::now();
        let v = analysis::is_super_rigid(&g, &rules(model)).map_err(e)?;
        let took = start.elapsed();
        ensure(v.super_rigid, || format!("{model}: not super rigid"))?;
        ensure(took < SUPER_RIGID_BUDGET, || format!("{model}: took {took:?}"))?;
        // Modules with an opposite pair of neighbors are eliminated by the
        // sandwich rule; the labeled ones must be among them.
        for name in ["1", "C"] {
            let p = labels.get(name).ok_or_else(|| format!("label {name} missing"))?;
            ensure(matches!(v.reason_of(*p), Some(ModuleReason::Sandwiched { .. })), || {
                format!("{model}: module {name} at {p} is not eliminated by an opposite pair")
            })?;
        }
        let sandwiched = v.modules.iter().filter(|m| matches!(m.reason, ModuleReason::Sandwiched { .. })).count();
        notes.push(format!("{model} {took:.0?}, {sandwiched}/{} sandwiched", g.len()));
    }
    Ok(notes.join("; "))
}

fn criterion_2() -> Check {
    let g = gadgets::super_rigid_config();
    let line = Configuration::new((0..g.len() as i32).map(|i| Position::new(i, i, 0).unwrap())).map_err(e)?;
    let mut notes = Vec::new();
    for model in MoveModel::ALL {
        let start = Instant::now();
        let stats = search::explore(&g, &rules(model), &SearchLimits::default(), &SearchOptions::sequential())
            .map_err(e)?;
        let r = search::reachable(&g, &line, &rules(model), &SearchLimits::default(), &SearchOptions::sequential())
            .map_err(e)?;
        let took = start.elapsed();
        ensure(stats.complete && stats.states == 1, || format!("{model}: {stats:?}"))?;
        ensure(r.outcome == Outcome::Exhausted, || format!("{model}: line search {:?}", r.outcome))?;
        ensure(took < COMPONENT_BUDGET, || format!("{model}: took {took:?}"))?;
        notes.push(format!("{model} component 1 state, line unreachable, {took:.0?}"));
    }
    Ok(notes.join("; "))
}

fn criterion_3() -> Check {
    let (a, b) = gadgets::free_rigid_pair();
    let mut notes = Vec::new();
    for model in MoveModel::ALL {
        let r = rules(model);
        ensure(analysis::is_rigid(&a, &r).map_err(e)?, || format!("{model}: (a) not rigid"))?;
        let v = analysis::is_super_rigid(&a, &r).map_err(e)?;
        ensure(!v.super_rigid, || format!("{model}: (a) super rigid"))?;
        ensure(!v.witnesses.is_empty(), || format!("{model}: no witness"))?;
        for w in &v.witnesses {
            ensure(a.iter().all(|p| w.configuration.contains(p)), || "witness drops modules".into())?;
            let moves = r.legal_moves(&w.configuration).map_err(e)?;
            ensure(moves.contains(&w.legal_move), || format!("{model}: witness move for {} not legal", w.module))?;
        }
        let mobile = analysis::mobility(&b, &r).map_err(e)?.mobile;
        ensure(mobile > 0, || format!("{model}: (b) has no mobile module"))?;
        notes.push(format!("{model} {} witnesses replayed, (b) {mobile} mobile", v.witnesses.len()));
    }
    Ok(notes.join("; "))
}

fn criterion_4() -> Check {
    let r = rules(MoveModel::Restricted);
    let mut worst = Duration::ZERO;
    let (mut blocked, mut disconnecting) = (0, 0);
    for radius in 1..=3 {
        for length in 2..=4 {
            let start = Instant::now();
            let roof = gadgets::build_capped_roof(radius, length).map_err(e)?;
            let report = analysis::mobility(&roof.configuration, &r).map_err(e)?;
            let took = start.elapsed();
            worst = worst.max(took);
            let case = format!("r={radius} L={length}");
            ensure(report.mobile == 0, || format!("{case}: {} mobile", report.mobile))?;
            ensure(took < CAPPED_ROOF_BUDGET, || format!("{case}: took {took:?}"))?;
            for p in roof.interior() {
                ensure(report.verdict_of(p) == Some(MobilityVerdict::Blocked), || {
                    format!("{case}: interior {p} not blocked")
                })?;
            }
            for p in roof.paths.iter().flatten() {
                match report.verdict_of(*p) {
                    Some(MobilityVerdict::Blocked) => blocked += 1,
                    Some(MobilityVerdict::Disconnecting) => disconnecting += 1,
                    other => return Err(format!("{case}: path module {p} is {other:?}")),
                }
            }
        }
    }
    Ok(format!(
        "9 roofs rigid, slowest {worst:.0?}; path modules: {blocked} blocked, {disconnecting} disconnecting"
    ))
}

fn criterion_5() -> Check {
    let disk = Configuration::new(gadgets::hex_disk(Position::ORIGIN, 2)).map_err(e)?;
    let s = gadgets::sandwich(&disk).map_err(e)?;
    let mut notes = vec![format!("{} modules", s.configuration.len())];
    for model in MoveModel::ALL {
        let r = rules(model);
        ensure(analysis::layer_confinement(&s.configuration, s.band, &r).map_err(e)?, || {
            format!("{model}: one-step violation")
        })?;
        let start = Instant::now();
        let found = search::band_escape(&s.configuration, s.band, &r, &SearchLimits::depth(CONFINEMENT_DEPTH))
            .map_err(e)?;
        ensure(found.outcome != Outcome::Reached, || format!("{model}: escape {:?}", found.moves))?;
        notes.push(format!(
            "{model} no escape in {CONFINEMENT_DEPTH} moves ({} states, {:.1?})",
            found.states_explored,
            start.elapsed()
        ));
    }
    Ok(notes.join("; "))
}

fn criterion_6() -> Check {
    let catalog = Catalog::shipped();
    for model in MoveModel::ALL {
        ensure(analysis::verify_sandwich_lemma(&rules(model)), || format!("{model}: sandwich lemma fails"))?;
    }
    ensure(catalog.is_symmetry_closed(), || "not closed under symmetries".into())?;
    ensure(catalog.is_reversal_closed(), || "not closed under reversal".into())?;
    let report = planar::check_2d_equivalence(catalog);
    ensure(report.all_matched, || format!("planar mismatch: {report:?}"))?;
    Ok(format!(
        "{} restricted / {} total templates; planar slices match",
        catalog.templates(MoveModel::Restricted).len(),
        catalog.templates(MoveModel::Monkey).len()
    ))
}

fn criterion_7() -> Check {
    let catalog = Catalog::shipped();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut total = 0;
    for i in 0..ORACLE_SAMPLES {
        let n = rng.gen_range(2..=ORACLE_MAX_MODULES);
        let c = random_connected(&mut rng, n);
        let model = MoveModel::ALL[i % 2];
        let lib: BTreeSet<(Cell, Cell, usize)> = rules(model)
            .legal_moves(&c)
            .map_err(e)?
            .iter()
            .map(|m| (m.source.coords(), m.target.coords(), m.template))
            .collect();
        let naive = naive_moves(&cells(&c), catalog, model);
        ensure(lib == naive, || format!("sample {i} ({model}): {c:?}"))?;
        total += lib.len();
    }
    let mut notes = vec![format!("{ORACLE_SAMPLES} samples, {total} moves agree")];
    for n in [3, 4] {
        let shapes = polyforms(n);
        for model in MoveModel::ALL {
            let brute = brute_components(&shapes, catalog, model);
            let mut groups: Vec<BTreeSet<BTreeSet<Cell>>> = Vec::new();
            let mut ids: Vec<usize> = brute.values().copied().collect::<BTreeSet<_>>().into_iter().collect();
            ids.sort();
            for id in ids {
                groups.push(brute.iter().filter(|(_, &v)| v == id).map(|(k, _)| k.clone()).collect());
            }
            for group in &groups {
                let rep = group.iter().next().unwrap();
                let c = config(&rep.iter().copied().collect());
                let comp = search::component(&c, &rules(model), &SearchLimits::default())
                    .map_err(e)?
                    .ok_or("component search hit a limit")?;
                let lib: BTreeSet<BTreeSet<Cell>> = comp.iter().map(|c| normal(&cells(c))).collect();
                ensure(&lib == group, || format!("n={n} {model}: component of {rep:?} differs"))?;
            }
            notes.push(format!("n={n} {model}: {} shapes, {} components", shapes.len(), groups.len()));
        }
    }
    Ok(notes.join("; "))
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut done = 0;
    let mut attempts = 0;
    while done < REVERSAL_SAMPLES {
        attempts += 1;
        ensure(attempts < 20 * REVERSAL_SAMPLES, || "too few configurations with moves".into())?;
        let model = MoveModel::ALL[attempts % 2];
        let r = rules(model);
        let n = rng.gen_range(2..=12);
        let c = random_connected(&mut rng, n);
        let moves = r.legal_moves(&c).map_err(e)?;
        if moves.is_empty() {
            continue;
        }
        let m = moves[rng.gen_range(0..moves.len())];
        let after = r.apply_move(&c, &m).map_err(e)?;
        let back = r.reverse(&m).ok_or_else(|| format!("no reverse for {m:?}"))?;
        ensure(r.is_legal(&after, &back), || format!("reverse of {m:?} illegal in {after:?}"))?;
        let restored = r.apply_move(&after, &back).map_err(e)?;
        ensure(restored == c, || format!("{m:?} then reverse does not restore {c:?}"))?;
        done += 1;
    }
    Ok(format!("{REVERSAL_SAMPLES} move/reverse pairs restore the start"))
}

fn criterion_9() -> Check {
    let g = gadgets::super_rigid_config();
    let original: HashSet<Position> = g.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut mobile_elsewhere = 0;
    for i in 0..SUPERSET_SAMPLES {
        let extra = rng.gen_range(1..=SUPERSET_MAX_EXTRA);
        let c = random_superset(&mut rng, &g, extra);
        let model = MoveModel::ALL[i % 2];
        let report = analysis::mobility(&c, &rules(model)).map_err(e)?;
        for p in report.mobile_positions() {
            ensure(!original.contains(&p), || format!("sample {i} ({model}): {p} moves in {c:?}"))?;
            mobile_elsewhere += 1;
        }
    }
    Ok(format!(
        "{SUPERSET_SAMPLES} supersets, no original module mobile ({mobile_elsewhere} added modules mobile)"
    ))
}

fn main() -> ExitCode {
    let checks: [Criterion; 9] = [
        ("super rigidity of the 19-module gadget", criterion_1),
        ("its component is a single state", criterion_2),
        ("rigid but not super rigid pair", criterion_3),
        ("capped roofs rigid", criterion_4),
        ("sandwich confinement", criterion_5),
        ("catalog integrity", criterion_6),
        ("oracle equivalence", criterion_7),
        ("reversibility", criterion_8),
        ("super-rigidity soundness fuzz", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name} [{took:.1?}] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} [{took:.1?}] {why}", i + 1);
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
