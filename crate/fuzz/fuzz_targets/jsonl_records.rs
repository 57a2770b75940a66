#![no_main]
use libfuzzer_sys::fuzz_target;
use revaudit::dataset::io::{read_jsonl, ReferenceRecord};
use revaudit::dataset::{ReviewRecord, Reviewer, Submission};

fuzz_target!(|data: &[u8]| {
    let _ = read_jsonl::<Reviewer, _>(data, "reviewers.jsonl");
    let _ = read_jsonl::<Submission, _>(data, "submissions.jsonl");
    let _ = read_jsonl::<ReviewRecord, _>(data, "reviews.jsonl");
    let _ = read_jsonl::<ReferenceRecord, _>(data, "references.jsonl");
});
