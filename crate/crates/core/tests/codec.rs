mod common;

use common::{syllable_char, FINAL_CLUSTERS};
use g2p_core::format::data_lines;
use g2p_core::hangul::{
    compose, decompose, deromanize, flatten, romanize, syllabify, Coda, Consonant, Jamo, Syllable, Vowel,
};
use proptest::prelude::*;

const CONSONANTS: &str = "ㄱㄲㄴㄷㄸㄹㅁㅂㅃㅅㅆㅇㅈㅉㅊㅋㅌㅍㅎ";
const VOWELS: &str = "ㅏㅐㅑㅒㅓㅔㅕㅖㅗㅘㅙㅚㅛㅜㅝㅞㅟㅠㅡㅢㅣ";

fn table() -> Vec<(String, String, char)> {
    let text = include_str!("../../../data/romanization.tsv");
    data_lines("romanization.tsv", text)
        .unwrap()
        .map(|(_, line)| {
            let f: Vec<&str> = line.split('\t').collect();
            assert_eq!(f.len(), 3, "{line:?}");
            (f[0].to_string(), f[1].to_string(), f[2].chars().next().unwrap())
        })
        .collect()
}

#[test]
fn romanization_file_matches_tables() {
    let rows = table();
    let class = |c: &str| rows.iter().filter(|r| r.0 == c).collect::<Vec<_>>();
    let initials = class("initial");
    let codas = class("coda");
    let vowels = class("vowel");
    assert_eq!((initials.len(), vowels.len(), codas.len()), (19, 21, 19));
    for (i, (row, jamo)) in initials.iter().zip(CONSONANTS.chars()).enumerate() {
        let c = Consonant::from_index(i).unwrap();
        assert_eq!(row.2, jamo);
        assert_eq!(c.compat_char(), jamo);
        assert_eq!(c.initial_token(), row.1);
    }
    for (i, (row, jamo)) in codas.iter().zip(CONSONANTS.chars()).enumerate() {
        let c = Consonant::from_index(i).unwrap();
        assert_eq!(row.2, jamo);
        assert_eq!(c.coda_token(), row.1);
    }
    for (i, (row, jamo)) in vowels.iter().zip(VOWELS.chars()).enumerate() {
        let v = Vowel::from_index(i).unwrap();
        assert_eq!(row.2, jamo);
        assert_eq!(v.compat_char(), jamo);
        assert_eq!(v.token(), row.1);
    }
}

#[test]
fn known_syllables() {
    let bab = decompose("밥").unwrap();
    assert_eq!(bab, vec![Syllable::new(Consonant::B, Vowel::from_index(0).unwrap(), Coda::single(Consonant::B))]);
    assert_eq!(romanize(&bab), "pab");
    assert_eq!(romanize(&decompose("값").unwrap()), "gabs");
    assert_eq!(compose(&deromanize("pang").unwrap()).unwrap(), "방");
    assert_eq!(compose(&deromanize("pang-gabs").unwrap()).unwrap(), "방값");
    assert_eq!(compose(&deromanize("teud").unwrap()).unwrap(), "듣");
    assert_eq!(compose(&deromanize("ta-seos").unwrap()).unwrap(), "다섯");
}

#[test]
fn code_point_arithmetic_agrees() {
    for i in 0..19u32 {
        for v in 0..21u32 {
            for f in 0..28u32 {
                let ch = syllable_char(i, v, f);
                let s = Syllable::from_char(ch).unwrap();
                assert_eq!(s.initial.index() as u32, i);
                assert_eq!(s.vowel.index() as u32, v);
                let cluster: Vec<usize> = s.coda.consonants().map(Consonant::index).collect();
                assert_eq!(cluster, FINAL_CLUSTERS[f as usize], "{ch}");
                assert_eq!(s.to_char(), Some(ch));
            }
        }
    }
}

#[test]
fn non_hangul_is_rejected() {
    assert!(decompose("밥a").is_err());
    assert!(deromanize("pxb").is_err());
    assert!(deromanize("aia").is_err());
}

#[test]
fn uncomposable_coda_cannot_compose() {
    let s = deromanize("pang-ggabss").unwrap();
    assert!(compose(&s).is_err());
    assert_eq!(romanize(&s), "pang-ggabss");
}

prop_compose! {
    fn syllable()(i in 0u32..19, v in 0u32..21, f in 0u32..28) -> Syllable {
        Syllable::from_char(syllable_char(i, v, f)).unwrap()
    }
}

proptest! {
    #[test]
    fn hangul_round_trip(s in prop::collection::vec(syllable(), 0..8)) {
        let text = compose(&s).unwrap();
        prop_assert_eq!(decompose(&text).unwrap(), s);
    }

    #[test]
    fn romanization_round_trip(s in prop::collection::vec(syllable(), 0..8)) {
        prop_assert_eq!(deromanize(&romanize(&s)).unwrap(), s);
    }

    #[test]
    fn two_syllables_decode(a in syllable(), b in syllable()) {
        let text = format!("{}-{}", a.romanize(), b.romanize());
        prop_assert_eq!(deromanize(&text).unwrap(), vec![a, b]);
    }

    #[test]
    fn flatten_syllabify(s in prop::collection::vec(syllable(), 0..8)) {
        let jamo = flatten(&s);
        prop_assert_eq!(jamo.iter().filter(|j| matches!(j, Jamo::Vowel(_))).count(), s.len());
        prop_assert_eq!(syllabify(&jamo).unwrap(), s);
    }
}
