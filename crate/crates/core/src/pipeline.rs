//! End-to-end batch run: ingest, build the corpus model, recommend teams.

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

use crate::ingest::{
    ingest_awards, ingest_calls, ingestion_report, parse_researcher_roster, read_roster_csv, AwardRecord,
    CallRecord, DesignationFilter, ExtractionStats, IngestError, ResearcherProfile,
};
use crate::matching::{build_corpus_model, CorpusVectorModel, MatchError, Matcher};
use crate::team::{recommend_for_user, TeamRecommendation, TeamingConfig};

/// Raw corpus files.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub calls: String,
    pub roster: String,
    pub awards: Option<String>,
}

#[derive(Debug, Clone)]
pub struct PipelineSettings {
    /// Calls whose last deadline is before this date are marked closed.
    pub reference_date: NaiveDate,
    pub config: TeamingConfig,
    pub designations: DesignationFilter,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("roster: {0}")]
    Roster(#[from] IngestError),
    #[error("matching: {0}")]
    Matching(#[from] MatchError),
}

#[derive(Debug, Clone, Serialize)]
pub struct PipelineRun {
    pub stats: ExtractionStats,
    pub calls: Vec<CallRecord>,
    pub profiles: Vec<ResearcherProfile>,
    pub awards: Vec<AwardRecord>,
    pub model: CorpusVectorModel,
    /// Grouped by lead in roster order, each lead's teams by descending score.
    pub recommendations: Vec<TeamRecommendation>,
    /// One line per rejected record or extraction warning.
    pub diagnostics: Vec<String>,
}

impl PipelineRun {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run serializes")
    }

    pub fn matcher(&self) -> Matcher<'_, f64> {
        Matcher::Corpus(&self.model)
    }
}

/// Parsed corpus before any matching.
#[derive(Debug, Clone, Serialize)]
pub struct IngestedCorpus {
    pub stats: ExtractionStats,
    pub calls: Vec<CallRecord>,
    pub profiles: Vec<ResearcherProfile>,
    pub awards: Vec<AwardRecord>,
    pub diagnostics: Vec<String>,
}

pub fn ingest_corpus(corpus: &Corpus, settings: &PipelineSettings) -> Result<IngestedCorpus, PipelineError> {
    let calls = ingest_calls(&corpus.calls, settings.reference_date);
    let roster = parse_researcher_roster(&read_roster_csv(corpus.roster.as_bytes())?, &settings.designations);
    let awards = corpus.awards.as_deref().map(ingest_awards).unwrap_or_default();

    let mut diagnostics: Vec<String> = calls.rejections.iter().map(|e| format!("call: {e}")).collect();
    diagnostics.extend(calls.warnings.iter().map(|(id, w)| format!("call {id}: {w:?}")));
    diagnostics.extend(roster.rejections.iter().map(|e| format!("roster: {e}")));
    diagnostics.extend(awards.rejections.iter().map(|e| format!("award: {e}")));

    let mut stats = ingestion_report(&calls.tally, Some(&roster.funnel));
    stats.awards_parsed = awards.records.len() as u64;
    stats.awards_rejected = awards.rejections.len() as u64;
    Ok(IngestedCorpus { stats, calls: calls.records, profiles: roster.admitted, awards: awards.records, diagnostics })
}

/// Builds the corpus model over call synopses and every user's teams,
/// grouped by lead in `profiles` order.
pub fn recommend_all(
    calls: &[CallRecord],
    profiles: &[ResearcherProfile],
    config: &TeamingConfig,
) -> Result<(CorpusVectorModel, Vec<TeamRecommendation>), MatchError> {
    let synopses: Vec<&str> = calls.iter().map(|c| c.synopsis.as_str()).collect();
    let model = build_corpus_model(&synopses)?;
    let matcher = Matcher::<f64>::Corpus(&model);
    let mut recommendations = Vec::new();
    for user in profiles {
        recommendations.extend(recommend_for_user(user, calls, profiles, &matcher, config)?);
    }
    Ok((model, recommendations))
}

pub fn run_pipeline(corpus: &Corpus, settings: &PipelineSettings) -> Result<PipelineRun, PipelineError> {
    let ingested = ingest_corpus(corpus, settings)?;
    let (model, recommendations) = recommend_all(&ingested.calls, &ingested.profiles, &settings.config)?;
    Ok(PipelineRun {
        stats: ingested.stats,
        calls: ingested.calls,
        profiles: ingested.profiles,
        awards: ingested.awards,
        model,
        recommendations,
        diagnostics: ingested.diagnostics,
    })
}
