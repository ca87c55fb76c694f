use std::collections::BTreeMap;

use chrono::NaiveDate;
use teaming_core::evaluation::{award_match_lists, feedback_summary, hit_rate_at_k, FeedbackEvent};
use teaming_core::ingest::{ingest_awards, ingest_calls, read_call_container, DesignationFilter};
use teaming_core::matching::{build_corpus_model, Matcher};
use teaming_core::pipeline::{run_pipeline, Corpus, PipelineRun, PipelineSettings};
use teaming_core::team::{check_constraints, TeamingConfig};
use teaming_core::{Embeddings, Money};

fn fixture(name: &str) -> String {
    let path = format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn day(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

fn settings() -> PipelineSettings {
    PipelineSettings {
        reference_date: day("2015-01-01"),
        config: TeamingConfig::default(),
        designations: DesignationFilter::default(),
    }
}

fn run() -> PipelineRun {
    let corpus = Corpus { calls: fixture("calls.txt"), roster: fixture("roster.csv"), awards: Some(fixture("awards.xml")) };
    run_pipeline(&corpus, &settings()).unwrap()
}

#[test]
fn extraction_rates_match_hand_annotation() {
    let run = run();
    let pct = |f: &str| run.stats.field(f).unwrap().percent.to_string();
    assert_eq!(pct("rfp"), "100.0");
    assert_eq!(pct("title"), "95.0");
    assert_eq!(pct("deadline"), "85.0");
    assert_eq!(pct("budget"), "90.0");
    assert_eq!(pct("synopsis"), "100.0");
    // 15 of the 17 rows left after the designation filter list skills
    assert_eq!(pct("users_research"), "88.2");
    let funnel = run.stats.roster.unwrap();
    assert_eq!((funnel.total_extracted, funnel.removed_by_designation, funnel.remaining, funnel.with_research_info), (20, 3, 17, 15));
    assert_eq!(run.profiles.len(), 15);
    assert_eq!(run.stats.awards_parsed, 17);
    assert!(run.diagnostics.is_empty(), "{:?}", run.diagnostics);
}

#[test]
fn body_fields_extracted_as_annotated() {
    let calls = ingest_calls(&fixture("calls.txt"), day("2015-01-01")).records;
    let get = |id: &str| calls.iter().find(|c| c.call_id == id).unwrap();
    let brain = get("nsf-14504");
    assert_eq!(brain.title.as_deref(), Some("Innovative Approaches to Science and Engineering Research on Brain Function"));
    assert_eq!(brain.deadlines, vec![day("2014-01-15")]);
    assert_eq!(brain.budget_total, Some(Money(6_000_000)));
    assert!(!brain.is_open);
    assert!(brain.synopsis.starts_with("This program supports research on brain function"));
    assert_eq!(get("nsf-scc").budget_total, Some(Money(5_000_000)));
    assert_eq!(get("nsf-wsc").budget_total, Some(Money(25_000_000)));
    assert_eq!(get("nsf-cps").deadlines, vec![day("2015-06-02")]);
    let cse = get("nsf-cse");
    assert_eq!((cse.title.as_deref(), cse.budget_total), (None, None));
    assert_eq!(cse.deadlines, vec![day("2015-02-10")]);
    let satc = get("nsf-satc");
    assert_eq!(satc.next_deadline(day("2015-02-01")), Some(day("2015-11-16")));
    assert_eq!(calls.iter().filter(|c| c.agency_id == "NSF").count(), 15);
}

#[test]
fn container_round_trip_preserves_records() {
    let calls = ingest_calls(&fixture("calls.txt"), day("2015-01-01")).records;
    let text: String = calls.iter().map(|c| c.to_container()).collect();
    assert_eq!(read_call_container(&text).len(), 20);
    assert_eq!(ingest_calls(&text, day("2015-01-01")).records, calls);
}

#[test]
fn vector_scores_aics_above_fuzzy() {
    let run = run();
    let aics = run.calls.iter().find(|c| c.call_id == "nsf-aics").unwrap();
    let amara = run.profiles.iter().find(|p| p.username == "amara").unwrap();
    let displays: Vec<_> = amara.raw_skills_by_source["site"].iter().map(String::as_str).collect();
    assert_eq!(displays, ["Artificial Intelligence", "Services", "Smarter Cities (Water", "Health", "Traffic)"]);
    let fuzzy = Matcher::<f64>::Fuzzy.score(aics, amara).unwrap().score;
    let vector = run.matcher().score(aics, amara).unwrap().score;
    assert!(vector > fuzzy, "vector {vector} fuzzy {fuzzy}");
}

#[test]
fn every_recommended_team_is_feasible() {
    let run = run();
    assert!(run.recommendations.len() >= 10);
    let config = TeamingConfig::default();
    for team in &run.recommendations {
        let call = run.calls.iter().find(|c| c.call_id == team.call_id).unwrap();
        let members: Vec<_> = team
            .participants()
            .into_iter()
            .map(|id| {
                let p = run.profiles.iter().find(|p| p.user_id == id).unwrap();
                (id, &p.skills)
            })
            .collect();
        let report = check_constraints(&members, call.budget_total, &config);
        assert!(report.all_satisfied(), "{}: {:?}", team.team_id, report);
        assert_eq!(report, team.report);
        assert!(team.members.iter().all(|m| m.score >= config.relevance_floor));
        if let Some(b) = call.budget_total {
            assert!(b.0 / team.size() as u64 >= config.per_participant_floor.0);
        }
    }
}

#[test]
fn pipeline_is_deterministic() {
    assert_eq!(run().to_json(), run().to_json());
}

#[test]
fn three_of_five_pis_hit_at_ten() {
    let run = run();
    let awards = ingest_awards(&fixture("awards.xml")).records;
    let texts: Vec<String> = teaming_core::evaluation::awards_as_calls(&awards).into_iter().map(|c| c.synopsis).collect();
    let model = build_corpus_model(&texts).unwrap();
    let lists = award_match_lists(&run.profiles, &awards, &Matcher::<f64>::Corpus(&model)).unwrap();
    let report = hit_rate_at_k(&lists, &awards, 10);
    assert_eq!((report.hits, report.pis_evaluated), (3, 5));
    assert_eq!(report.hit_rate, 0.6);
    let mut prev = 0.0;
    for k in 1..=15 {
        let r = hit_rate_at_k(&lists, &awards, k).hit_rate;
        assert!(r >= prev);
        prev = r;
    }
}

#[test]
fn feedback_fixture_summary() {
    let events: Vec<FeedbackEvent> = fixture("feedback.jsonl").lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let s = feedback_summary(&events, 7);
    assert_eq!((s.total, s.at_or_above), (70, 65));
    let with_low: BTreeMap<_, _> = s.per_user.iter().filter(|(_, u)| !u.below_threshold.is_empty()).collect();
    assert_eq!(with_low.len(), 5);
}

#[test]
fn embedding_fixture_scores() {
    let table = Embeddings::parse(&fixture("embeddings.tsv")).unwrap();
    assert_eq!(table.dimension(), 4);
    let near = table.score("nsf-satc", "u09").unwrap().score;
    let far = table.score("nsf-satc", "u01").unwrap().score;
    assert!(near > 90 && far < 10, "{near} {far}");
}
