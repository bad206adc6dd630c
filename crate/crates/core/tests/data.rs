use std::fs;
use std::path::Path;

use dsfusion::data::{
    gen_synthetic, load_dataset_from, load_evidence, save_evidence, write_dataset,
    EvidenceArtifact, SynthSpec,
};
use dsfusion::{
    make_mass, EvidenceParams, Frame, FusionDataset, FusionError, Mode, Pattern, ScoreVector,
};
use proptest::prelude::*;

fn names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("net{i}")).collect()
}

/// Reverse the data rows of a CSV file, keeping the header first.
fn reverse_rows(path: &Path) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[1..].reverse();
    fs::write(path, lines.join("\n") + "\n").unwrap();
}

#[test]
fn row_order_does_not_matter() {
    let spec = SynthSpec::uniform(4, 3, 60, 0.8, 17);
    let ds = gen_synthetic(&spec).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let manifest = write_dataset(&ds, dir.path(), &names(3)).unwrap();
    let path = dir.path().join("manifest.json");
    assert_eq!(load_dataset_from(&path).unwrap(), ds);

    reverse_rows(&dir.path().join(&manifest.targets_path));
    reverse_rows(&dir.path().join(&manifest.classifiers[1].scores_path));
    assert_eq!(load_dataset_from(&path).unwrap(), ds);
}

#[test]
fn written_files_are_reproducible() {
    let spec = SynthSpec {
        correlation: 0.4,
        ..SynthSpec::uniform(3, 2, 40, 0.7, 3)
    };
    let read_all = |dir: &Path| {
        let mut files: Vec<_> = fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        files.sort();
        files
            .iter()
            .map(|f| fs::read(f).unwrap())
            .collect::<Vec<_>>()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    write_dataset(&gen_synthetic(&spec).unwrap(), a.path(), &names(2)).unwrap();
    write_dataset(&gen_synthetic(&spec).unwrap(), b.path(), &names(2)).unwrap();
    assert_eq!(read_all(a.path()), read_all(b.path()));
}

#[test]
fn distinct_seeds_give_distinct_data() {
    let a = gen_synthetic(&SynthSpec::uniform(3, 2, 50, 0.8, 100)).unwrap();
    let b = gen_synthetic(&SynthSpec::uniform(3, 2, 50, 0.8, 101)).unwrap();
    assert_ne!(a, b);
}

proptest! {
    #[test]
    fn make_mass_accepts_only_normalized(raw in prop::collection::vec(0.0f64..1.0, 3..10)) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-6);
        let v: Vec<f64> = raw.iter().map(|r| r / total).collect();
        let (theta, singles) = v.split_last().unwrap();
        let m = make_mass(singles, *theta).unwrap();
        prop_assert!((m.total() - 1.0).abs() <= 1e-9);
        prop_assert!(m.singletons().iter().all(|&x| x >= 0.0));

        let mut off = singles.to_vec();
        off[0] += 1e-6;
        prop_assert!(make_mass(&off, *theta).is_err());
    }

    #[test]
    fn evidence_round_trip_is_bit_exact(
        mode in prop::sample::select(vec![Mode::Ds1, Mode::Ds2]),
        n in 1usize..4,
        k in 2usize..5,
        seed in any::<u64>(),
    ) {
        let len = n * k * mode.reference_len(k);
        let weights: Vec<f64> = (0..len)
            .map(|i| f64::from_bits(seed.rotate_left(i as u32) >> 12 | 0x3FF0_0000_0000_0000) - 1.3)
            .collect();
        let ignorance: Vec<f64> = (0..n).map(|i| 1.0 / (3.0 + i as f64 + seed as f64 % 7.0)).collect();
        let params = EvidenceParams::new(mode, n, k, weights, ignorance).unwrap();
        let artifact = EvidenceArtifact { params, seed, training_meta: None };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.json");
        save_evidence(&path, &artifact).unwrap();
        prop_assert_eq!(load_evidence(&path).unwrap(), artifact);
    }

    #[test]
    fn ragged_datasets_are_rejected(
        k in 2usize..5,
        n in 1usize..4,
        defect in 0usize..4,
        at in 0usize..5,
    ) {
        let frame = Frame::numbered(k).unwrap();
        let mut patterns: Vec<Pattern> = (0..5)
            .map(|i| Pattern {
                id: i as u64,
                scores: (0..n).map(|c| ScoreVector::new(vec![0.5; k], c).unwrap()).collect(),
                target: dsfusion::one_hot(i % k + 1, k).unwrap(),
            })
            .collect();
        prop_assert!(FusionDataset::new(frame.clone(), n, patterns.clone()).is_ok());
        let p = &mut patterns[at];
        match defect {
            0 => p.scores.push(ScoreVector::new(vec![0.5; k], n).unwrap()),
            1 => p.scores[0] = ScoreVector::new(vec![0.5; k - 1], 0).unwrap(),
            2 => p.target[0] = 0.5,
            _ => p.target = vec![0.0; k],
        }
        prop_assert!(matches!(
            FusionDataset::new(frame, n, patterns),
            Err(FusionError::InvalidDataset(_))
        ));
    }
}
