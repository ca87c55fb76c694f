//! File-backed entity store with an append-only feedback log.
//!
//! On-disk layout under the store root:
//!
//! ```text
//! VERSION                         schema version, a single integer
//! <kind>/<id>.json                one pretty-printed JSON record per id
//! events/feedback-NNNNNN.jsonl    feedback log segments, one {"seq", "event"} per line
//! ```
//!
//! `<kind>` is one of `calls`, `users`, `awards`, `recommendations`,
//! `models`, `outbox`, `reports`. Ids are percent-encoded in file names.
//! Record files are replaced by write-then-rename, so a reader never sees a
//! partial record. All writes go through one lock; reads are served from
//! memory and never touch the disk.

mod entity;
mod store;

pub use entity::{Entity, IngestReport, Kind, Notification, StoredModel};
pub use store::{LoggedEvent, Store, StoreError, StoreSnapshot, SCHEMA_VERSION, SEGMENT_CAPACITY};
