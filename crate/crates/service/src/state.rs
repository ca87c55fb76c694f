use std::path::PathBuf;
use std::sync::Arc;

use chrono::{DateTime, NaiveDate, Utc};
use teaming_core::ingest::DesignationFilter;
use teaming_core::team::TeamingConfig;
use teaming_store::Store;

/// Source of the current time, injectable for tests.
pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;

    fn today(&self) -> NaiveDate {
        self.now().date_naive()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixedClock(pub DateTime<Utc>);

impl Clock for FixedClock {
    fn now(&self) -> DateTime<Utc> {
        self.0
    }
}

/// Corpus files read by `POST /admin/ingest`.
#[derive(Debug, Clone, Default)]
pub struct CorpusPaths {
    pub calls: PathBuf,
    pub roster: PathBuf,
    pub awards: Option<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct ServiceSettings {
    pub teaming: TeamingConfig,
    pub corpus: CorpusPaths,
    /// Designation terms excluded at ingestion; `None` uses the built-in list.
    pub designations: Option<Vec<String>>,
}

impl ServiceSettings {
    pub fn designation_filter(&self) -> DesignationFilter {
        match &self.designations {
            Some(terms) => DesignationFilter::new(terms),
            None => DesignationFilter::default(),
        }
    }
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    pub settings: Arc<ServiceSettings>,
    pub clock: Arc<dyn Clock>,
}

impl AppState {
    pub fn new(store: Store, settings: ServiceSettings, clock: impl Clock + 'static) -> Self {
        AppState { store: Arc::new(store), settings: Arc::new(settings), clock: Arc::new(clock) }
    }

    /// Same store and settings, different clock.
    pub fn with_clock(&self, clock: impl Clock + 'static) -> Self {
        AppState { clock: Arc::new(clock), ..self.clone() }
    }
}
