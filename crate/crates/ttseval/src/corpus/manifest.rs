//! Kaldi-style two-column manifests: `<utterance-id><TAB><payload>`.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use super::CorpusError;

/// What the payload column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifestKind {
    /// Path to a WAV file or feature dump.
    Audio,
    /// Transcript text.
    Text,
    /// Comma-separated 1..5 ratings.
    Ratings,
}

/// Ordered utterance-id to payload mapping.
#[derive(Debug, Clone)]
pub struct Manifest {
    kind: ManifestKind,
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(kind: ManifestKind) -> Self {
        Self {
            kind,
            entries: Vec::new(),
        }
    }

    /// Builds from (id, payload) pairs, rejecting duplicate or invalid ids.
    pub fn from_entries(
        kind: ManifestKind,
        entries: Vec<(String, String)>,
    ) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for (line, (id, _)) in entries.iter().enumerate() {
            validate_id(id, line + 1)?;
            if !seen.insert(id.clone()) {
                return Err(CorpusError::DuplicateId {
                    id: id.clone(),
                    line: line + 1,
                });
            }
        }
        Ok(Self { kind, entries })
    }

    pub fn kind(&self) -> ManifestKind {
        self.kind
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(entry_id, _)| entry_id == id)
            .map(|(_, payload)| payload.as_str())
    }
}

fn validate_id(id: &str, line: usize) -> Result<(), CorpusError> {
    if id.is_empty() {
        return Err(CorpusError::MalformedLine {
            line,
            reason: "empty utterance id".into(),
        });
    }
    if id.contains('\t') {
        return Err(CorpusError::MalformedLine {
            line,
            reason: "utterance id contains a tab".into(),
        });
    }
    Ok(())
}

/// Loads a manifest, preserving file order and rejecting duplicates.
pub fn load_manifest(path: &Path, kind: ManifestKind) -> Result<Manifest, CorpusError> {
    let text = fs::read_to_string(path)?;
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.is_empty() {
            continue;
        }
        let (id, payload) = line.split_once('\t').ok_or(CorpusError::MalformedLine {
            line: line_no,
            reason: "expected <id><TAB><payload>".into(),
        })?;
        validate_id(id, line_no)?;
        if !seen.insert(id.to_string()) {
            return Err(CorpusError::DuplicateId {
                id: id.to_string(),
                line: line_no,
            });
        }
        entries.push((id.to_string(), payload.to_string()));
    }
    Ok(Manifest { kind, entries })
}

/// Writes the manifest as TSV with LF line endings.
pub fn save_manifest(manifest: &Manifest, path: &Path) -> Result<(), CorpusError> {
    let mut out = String::new();
    for (id, payload) in manifest.entries() {
        out.push_str(id);
        out.push('\t');
        out.push_str(payload);
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// A reference/generated payload pair for one utterance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalPair {
    pub utterance_id: String,
    pub ref_payload: String,
    pub gen_payload: String,
}

/// Pairs utterances over the id intersection, in reference order.
///
/// Also reports ids present on only one side. Errors when the
/// intersection is empty.
pub fn pair_utterances(
    reference: &Manifest,
    generated: &Manifest,
) -> Result<(Vec<EvalPair>, Vec<String>, Vec<String>), CorpusError> {
    if reference.kind() != generated.kind() {
        return Err(CorpusError::KindMismatch {
            left: reference.kind(),
            right: generated.kind(),
        });
    }
    let gen_ids: HashSet<&str> = generated
        .entries()
        .iter()
        .map(|(id, _)| id.as_str())
        .collect();
    let ref_ids: HashSet<&str> = reference
        .entries()
        .iter()
        .map(|(id, _)| id.as_str())
        .collect();

    let mut pairs = Vec::new();
    let mut missing_in_gen = Vec::new();
    for (id, ref_payload) in reference.entries() {
        if gen_ids.contains(id.as_str()) {
            pairs.push(EvalPair {
                utterance_id: id.clone(),
                ref_payload: ref_payload.clone(),
                gen_payload: generated.get(id).unwrap().to_string(),
            });
        } else {
            missing_in_gen.push(id.clone());
        }
    }
    let missing_in_ref: Vec<String> = generated
        .entries()
        .iter()
        .filter(|(id, _)| !ref_ids.contains(id.as_str()))
        .map(|(id, _)| id.clone())
        .collect();

    if pairs.is_empty() {
        return Err(CorpusError::EmptyIntersection);
    }
    Ok((pairs, missing_in_gen, missing_in_ref))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use tempfile::tempdir;

    fn write_and_load(content: &str) -> Result<Manifest, CorpusError> {
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.scp");
        std::fs::write(&path, content).unwrap();
        load_manifest(&path, ManifestKind::Audio)
    }

    #[test]
    fn two_line_file_preserves_order() {
        let m = write_and_load("a\t/x.wav\nb\t/y.wav\n").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.entries()[0], ("a".into(), "/x.wav".into()));
        assert_eq!(m.entries()[1], ("b".into(), "/y.wav".into()));
    }

    #[test]
    fn duplicate_id_cites_the_line() {
        let err = write_and_load("a\t/x.wav\nb\t/y.wav\na\t/z.wav\n").unwrap_err();
        match err {
            CorpusError::DuplicateId { id, line } => {
                assert_eq!(id, "a");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn empty_file_is_a_valid_empty_manifest() {
        let m = write_and_load("").unwrap();
        assert!(m.is_empty());
    }

    #[test]
    fn missing_tab_is_malformed() {
        let err = write_and_load("a /x.wav\n").unwrap_err();
        assert!(matches!(err, CorpusError::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn save_load_round_trip() {
        let m = Manifest::from_entries(
            ManifestKind::Text,
            vec![
                ("utt1".into(), "hello world".into()),
                ("utt2".into(), "".into()),
                ("utt3".into(), "text with spaces  kept".into()),
            ],
        )
        .unwrap();
        let dir = tempdir().unwrap();
        let path = dir.path().join("round.scp");
        save_manifest(&m, &path).unwrap();
        let back = load_manifest(&path, ManifestKind::Text).unwrap();
        assert_eq!(m.entries(), back.entries());
    }

    proptest! {
        #[test]
        fn round_trip_arbitrary_payloads(
            ids in proptest::collection::hash_set("[a-z0-9_]{1,8}", 1..8),
            payload in "[ -~]*",
        ) {
            let entries: Vec<(String, String)> = ids
                .into_iter()
                .map(|id| (id, payload.clone()))
                .collect();
            let m = Manifest::from_entries(ManifestKind::Text, entries).unwrap();
            let dir = tempdir().unwrap();
            let path = dir.path().join("p.scp");
            save_manifest(&m, &path).unwrap();
            let back = load_manifest(&path, ManifestKind::Text).unwrap();
            prop_assert_eq!(m.entries(), back.entries());
        }
    }

    fn manifest_of(ids: &[&str]) -> Manifest {
        Manifest::from_entries(
            ManifestKind::Audio,
            ids.iter().map(|id| (id.to_string(), format!("/{id}.wav"))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn pairing_reports_both_difference_lists() {
        let r = manifest_of(&["a", "b", "c"]);
        let g = manifest_of(&["b", "c", "d"]);
        let (pairs, missing_in_gen, missing_in_ref) = pair_utterances(&r, &g).unwrap();
        let ids: Vec<&str> = pairs.iter().map(|p| p.utterance_id.as_str()).collect();
        assert_eq!(ids, vec!["b", "c"]);
        assert_eq!(missing_in_gen, vec!["a"]);
        assert_eq!(missing_in_ref, vec!["d"]);
        assert_eq!(pairs.len() + missing_in_gen.len(), r.len());
    }

    #[test]
    fn identical_sets_pair_fully() {
        let r = manifest_of(&["a", "b"]);
        let (pairs, mg, mr) = pair_utterances(&r, &r.clone()).unwrap();
        assert_eq!(pairs.len(), 2);
        assert!(mg.is_empty() && mr.is_empty());
    }

    #[test]
    fn disjoint_sets_are_an_error() {
        let r = manifest_of(&["a"]);
        let g = manifest_of(&["b"]);
        assert!(matches!(
            pair_utterances(&r, &g),
            Err(CorpusError::EmptyIntersection)
        ));
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let r = manifest_of(&["a"]);
        let g = Manifest::from_entries(ManifestKind::Text, vec![("a".into(), "t".into())]).unwrap();
        assert!(matches!(
            pair_utterances(&r, &g),
            Err(CorpusError::KindMismatch { .. })
        ));
    }
}
