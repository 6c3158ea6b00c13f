//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempdx_core::engine::{verify_coverage, verify_path, verify_possible, Engine, Window};
use tempdx_core::observations::{Anchor, Observation, ObservationTable};
use tempdx_core::sia::{composition_table, BasicRelation, BasicRelation::*, RelationSet};
use tempdx_core::Time;

const ALGEBRA_LIMIT: Duration = Duration::from_secs(5);
const SIA_LIMIT: Duration = Duration::from_secs(10);
const NETWORK_LIMIT: Duration = Duration::from_secs(60);
const SELF_CHECK_LIMIT: Duration = Duration::from_secs(120);
/// Frozen count of non-empty relation sets that survive encode/decode.
const SIA_GOLDEN: usize = 82;
const NETWORK_SAMPLES: usize = 500;
const SUBSAMPLES: usize = 100;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<String, String> {
    let took = start.elapsed();
    check(took < limit, format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(format!("{took:.2?}"))
}

fn anchor(rel: impl Into<RelationSet>, lo: i64, hi: i64) -> Anchor {
    Anchor::new(rel.into(), Time::int(lo), Time::int(hi))
}

fn label(anchors: &[Anchor], lo: i64, hi: i64) -> Option<RelationSet> {
    anchors.iter().find(|a| a.lo == Time::int(lo) && a.hi == Time::int(hi)).map(|a| a.relation)
}

fn algebra() -> Outcome {
    let start = Instant::now();
    let table = composition_table();
    for a in BasicRelation::ALL {
        check(a.converse() == converse_by_swap(a), format!("converse of {a}"))?;
        for b in BasicRelation::ALL {
            let got = RelationSet::from_bits(table[a.index()][b.index()]);
            check(got == compose_by_search(a, b), format!("{a} ∘ {b}"))?;
        }
    }
    within(start, ALGEBRA_LIMIT)
}

fn sia_count() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for bits in 1u16..0x2000 {
        let r = RelationSet::from_bits(bits);
        check(r.is_sia() == sia_by_sampling(r), format!("oracle disagrees on {r}"))?;
        count += usize::from(r.is_sia());
    }
    check(count == SIA_GOLDEN, format!("{count} sets, golden {SIA_GOLDEN}"))?;
    Ok(format!("{count} non-empty sets ({} with the empty set), {}", count + 1, within(start, SIA_LIMIT)?))
}

fn network_oracle() -> Outcome {
    let start = Instant::now();
    let sia = sia_sets();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE);
    for round in 0..NETWORK_SAMPLES {
        let case = random_case(&mut rng, &sia);
        let expected = labels_by_enumeration(&case.nodes, &case.edges, case.max);
        match (expected, to_network(&case).solve()) {
            (None, Err(_)) => {}
            (Some(labels), Ok(solved)) => {
                for i in 0..case.nodes.len() {
                    for j in 0..case.nodes.len() {
                        check(solved.relation(i, j) == labels[i][j], format!("round {round} labels ({i},{j})"))?;
                    }
                }
            }
            _ => return Err(format!("round {round}: consistency verdicts differ")),
        }
    }
    Ok(format!("{NETWORK_SAMPLES} networks, {}", within(start, NETWORK_LIMIT)?))
}

fn maximal_runs() -> Outcome {
    let table = dense();
    let got: Vec<(String, Vec<Anchor>)> = table
        .maximal_aobs()
        .into_iter()
        .filter(|a| a.value == "p")
        .map(|a| (a.parameter, a.anchors))
        .collect();
    let want = vec![
        ("anti_hbc".to_string(), vec![anchor(OverlappedBy, 2, 3), anchor(Contains, 3, 9)]),
        ("anti_hbe".to_string(), vec![anchor(OverlappedBy, 5, 6), anchor(Contains, 6, 9)]),
        ("anti_hbs".to_string(), vec![anchor(OverlappedBy, 7, 8), anchor(Contains, 8, 9)]),
        ("hbe_ag".to_string(), vec![anchor(OverlappedBy, 1, 2), anchor(Overlaps, 3, 4)]),
        ("hbs_ag".to_string(), vec![anchor(OverlappedBy, 1, 2), anchor(Overlaps, 5, 6)]),
        ("igm_anti_hbc".to_string(), vec![anchor(OverlappedBy, 2, 3), anchor(Overlaps, 7, 8)]),
    ];
    check(got == want, format!("got {got:?}"))?;
    Ok("six positive runs".into())
}

fn necessary_and_split() -> Outcome {
    let (kb, table) = (hepatitis(), dense());
    let engine = Engine::new(&kb, &table).map_err(|e| e.to_string())?;
    let bm = kb.model("incubation").ok_or("no incubation model")?;
    let aobs = engine.aobs();
    let find = |id: &str| aobs.iter().find(|a| a.extent == id).cloned().ok_or(format!("missing {id}"));
    let (hbs, hbe) = (find("hbs_ag=p[2..5]")?, find("hbe_ag=p[2..3]")?);
    let observed = engine.observed_relation(&hbs, &hbe);
    check(observed == RelationSet::of(&[OverlappedBy, StartedBy, Contains]), format!("observed {observed}"))?;
    let model = bm.network().and_then(|n| n.solve()).map_err(|e| e.to_string())?;
    let modeled = model.relation_ids("t_hbs_ag", "t_hbe_ag").map_err(|e| e.to_string())?;
    check(modeled == RelationSet::of(&[Overlaps, FinishedBy, Contains]), format!("model {modeled}"))?;
    let caobs: Vec<_> = bm
        .manifestations
        .iter()
        .zip([hbs, hbe])
        .map(|(m, a)| tempdx_core::engine::Binding { manifestation: m.clone(), aobs: a })
        .collect();
    check(!engine.covers(bm, &caobs), "maximal pair passes Necessary")?;
    let split = engine.split(bm, &caobs).ok_or("no split")?;
    let hbs1 = &split[0].aobs;
    check(hbs1.extent == "hbs_ag=p[2..3]", format!("split to {}", hbs1.extent))?;
    check(hbs1.anchors == vec![anchor(OverlappedBy, 1, 2), anchor(Overlaps, 3, 4)], "split anchors")?;
    let rel = engine.observed_relation(hbs1, &split[1].aobs);
    check(rel == RelationSet::CONT, format!("split relation {rel}"))?;
    check(engine.covers(bm, &split), "split pair fails Necessary")?;
    Ok("{oi, si, di} fails, split gives cont".into())
}

fn instantiation() -> Outcome {
    let (kb, table) = (hepatitis(), dense());
    let engine = Engine::new(&kb, &table).map_err(|e| e.to_string())?;
    let h = engine.abduction("incubation").and_then(|mut a| a.next()).ok_or("no hypothesis")?;
    let a = &h.atbma.anchors;
    check(label(a, 1, 2) == Some(RelationSet::CONT), format!("[1, 2]: {:?}", label(a, 1, 2)))?;
    let bmo = RelationSet::of(&[Before, Meets, Overlaps]);
    check(label(a, 3, 4) == Some(bmo), format!("[3, 4]: {:?}", label(a, 3, 4)))?;
    Ok("{cont}[1, 2] {b, m, o}[3, 4]".into())
}

fn tightening() -> Outcome {
    let (kb, table) = (hepatitis(), dense());
    let engine = Engine::new(&kb, &table).map_err(|e| e.to_string())?;
    let h = engine.abduction("incubation").and_then(|mut a| a.next()).ok_or("no hypothesis")?;
    let c = engine.consistency(&h).ok_or("inconsistent")?;
    let a = &c.atbma.anchors;
    let first = label(a, 1, 2).ok_or("no [1, 2] label")?;
    check(first.is_subset(RelationSet::CONT), format!("[1, 2]: {first}"))?;
    let second = label(a, 2, 3).ok_or("no [2, 3] label")?;
    let allowed = RelationSet::of(&[Before, Meets, Overlaps, During, Starts]);
    check(second.is_subset(allowed) && second.contains(Overlaps), format!("[2, 3]: {second}"))?;
    check(second == Overlaps.into(), format!("[2, 3] is {second}, not exactly {{o}}"))?;
    Ok(format!("{first}[1, 2] {second}[2, 3], exact"))
}

fn static_bounds() -> Outcome {
    let (kb, table) = (hepatitis(), dense());
    let engine = Engine::new(&kb, &table).map_err(|e| e.to_string())?;
    let cands = engine.candidates("incubation");
    check(cands.len() == 1, format!("{} candidates", cands.len()))?;
    let a = &cands[0].atbma;
    check(a.anchors == vec![anchor(OverlappedBy, -1, 2), anchor(Overlaps, 2, 3)], format!("anchors {:?}", a.anchors))?;
    let bounds: Vec<_> = a.durations.iter().map(|d| (d.subject.as_str(), d.bound)).collect();
    check(bounds == [("t_in", Rational64::from_integer(3))], format!("bounds {bounds:?}"))?;
    Ok("{oi}[-1, 2] {o}[2, 3] t_in < 3".into())
}

fn sparse_diagnosis() -> Outcome {
    let (kb, table) = (hepatitis(), sparse());
    let engine = Engine::new(&kb, &table).map_err(|e| e.to_string())?;
    let diagnoses = engine.atd(None);
    let d = diagnoses
        .iter()
        .find(|d| d.candidate("incubation").is_some() && d.candidate("convalescence2").is_some())
        .ok_or("no incubation/convalescence2 diagnosis")?;
    let inc = &d.candidate("incubation").unwrap().atbma;
    check(inc.anchors == vec![anchor(OverlappedBy, -1, 2), anchor(Overlaps, 2, 5)], format!("incubation {:?}", inc.anchors))?;
    let want = Window::new((Time::int(-1), Time::int(2)), (Time::int(2), Time::int(5)));
    check(inc.window == Some(want), "incubation window")?;
    check(inc.durations.iter().any(|b| b.bound == Rational64::from_integer(3)), "t_in < 3 not recorded")?;
    let co2 = &d.candidate("convalescence2").unwrap().atbma;
    check(label(&co2.anchors, 2, 6) == Some(OverlappedBy.into()), format!("convalescence2 {:?}", co2.anchors))?;
    check(d.relation("t_in", "t_co2") == Some(Before.into()), format!("relation {:?}", d.relation("t_in", "t_co2")))?;

    let full = engine.complete(d);
    let ac2 = full.completed.iter().find(|a| a.mode == "acute2").ok_or("acute2 not added")?;
    check(ac2.anchors == vec![anchor(During, 2, 6)], format!("acute2 {:?}", ac2.anchors))?;
    check(full.relation("t_in", "t_ac2") == Some(Meets.into()), "t_in {m} t_ac2")?;
    check(full.relation("t_ac2", "t_co2") == Some(Meets.into()), "t_ac2 {m} t_co2")?;
    Ok("diagnosis and completion exact".into())
}

fn self_check() -> Outcome {
    let start = Instant::now();
    let kb = hepatitis();
    let table = dense();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1A6);
    let mut checked = 0;
    for round in 0..SUBSAMPLES {
        let keep: BTreeSet<Observation> = table.observations().filter(|_| rng.gen_bool(0.7)).cloned().collect();
        let sample = table.filter(|o| keep.contains(o));
        let engine = Engine::new(&kb, &sample).map_err(|e| e.to_string())?;
        let positives = engine.positive_observations();
        for d in engine.atd(None) {
            check(verify_coverage(&d, &positives), format!("round {round}: coverage"))?;
            check(verify_possible(&d, &kb), format!("round {round}: consistency models"))?;
            check(verify_path(&d, &kb), format!("round {round}: path"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} diagnoses over {SUBSAMPLES} subsamples, {}", within(start, SELF_CHECK_LIMIT)?))
}

/// Inserts a midpoint after every observation but the last of each record,
/// carrying the earlier value.
fn doubled(table: &ObservationTable) -> ObservationTable {
    let mut obs = Vec::new();
    for p in table.parameters() {
        let record = table.record(p);
        for (k, o) in record.iter().enumerate() {
            obs.push(o.clone());
            if let Some(next) = record.get(k + 1) {
                let mid = (o.time + next.time) / Rational64::from_integer(2);
                obs.push(Observation::new(p, o.value.clone(), mid));
            }
        }
    }
    ObservationTable::from_observations(obs).unwrap()
}

fn density() -> Outcome {
    let kb = hepatitis();
    let table = dense();
    let twice = doubled(&table);
    check(twice.len() > table.len(), "no observations added")?;
    let calls = |t: &ObservationTable| -> Result<(usize, usize), String> {
        let engine = Engine::new(&kb, t).map_err(|e| e.to_string())?;
        let n = engine.atd(None).len();
        Ok((engine.stats().necessary_calls, n))
    };
    let (base, n1) = calls(&table)?;
    let (dbl, n2) = calls(&twice)?;
    check(base == dbl, format!("{base} Necessary calls at base density, {dbl} doubled"))?;
    check(n1 == n2, format!("{n1} diagnoses at base density, {n2} doubled"))?;
    Ok(format!("{base} Necessary calls at both densities"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("algebra oracle equivalence", algebra),
        ("SIA enumeration golden count", sia_count),
        ("network oracle", network_oracle),
        ("maximal abstract observations", maximal_runs),
        ("necessary check and splitting", necessary_and_split),
        ("instantiation labels", instantiation),
        ("consistency tightening", tightening),
        ("static duration evaluation", static_bounds),
        ("sparse diagnosis and completion", sparse_diagnosis),
        ("diagnosis self-check on subsamples", self_check),
        ("Necessary count independent of density", density),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(note) => println!("PASS {:>2} {name}: {note}", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
