//! JSON serialization for automata.
//!
//! The document shape is
//! `{"alphabet": [...], "states": N, "initial": i, "finals": [...],
//!   "transitions": [[from, symbol, to], ...]}`
//! with transitions sorted by (from, symbol index, to) and ε-transitions
//! encoded with a `null` symbol. Serialization is canonical, so documents
//! produced here round-trip byte-exactly.

use super::{Alphabet, Automaton, FsaError, Symbol};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
struct AutomatonDoc {
    alphabet: Vec<String>,
    states: usize,
    initial: usize,
    finals: Vec<usize>,
    transitions: Vec<(usize, Option<String>, usize)>,
}

impl Serialize for Automaton {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut transitions: Vec<(usize, Option<String>, usize)> = Vec::new();
        let mut raw: Vec<(usize, usize, usize)> = Vec::new();
        for (from, s, to) in self.transition_list() {
            raw.push((from, s, to));
        }
        raw.sort_unstable();
        for (from, s, to) in raw {
            transitions.push((from, Some(self.alphabet().label(s).to_string()), to));
        }
        for (from, to) in self.epsilon_list() {
            transitions.push((from, None, to));
        }
        AutomatonDoc {
            alphabet: self.alphabet().labels().to_vec(),
            states: self.num_states(),
            initial: self.initial(),
            finals: self.final_states(),
            transitions,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Automaton {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = AutomatonDoc::deserialize(deserializer)?;
        let alphabet = Alphabet::new(doc.alphabet).map_err(D::Error::custom)?;
        let mut labelled: Vec<(usize, Symbol, usize)> = Vec::new();
        let mut epsilons: Vec<(usize, usize)> = Vec::new();
        for (from, label, to) in &doc.transitions {
            match label {
                Some(l) => {
                    let s = alphabet
                        .lookup(l)
                        .ok_or_else(|| D::Error::custom(format!("unknown symbol `{l}`")))?;
                    labelled.push((*from, s, *to));
                }
                None => epsilons.push((*from, *to)),
            }
        }
        let mut a =
            Automaton::from_parts(alphabet, doc.states, doc.initial, &doc.finals, &labelled)
                .map_err(D::Error::custom)?;
        for (from, to) in epsilons {
            if from >= a.num_states() || to >= a.num_states() {
                return Err(D::Error::custom("ε-transition out of range"));
            }
            a.add_epsilon(from, to);
        }
        Ok(a)
    }
}

impl Automaton {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("automaton serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Automaton, FsaError> {
        serde_json::from_str(s).map_err(|e| FsaError::Invalid(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip_is_byte_exact() {
        let al = Alphabet::new(["a", "A"]).unwrap();
        let m = Automaton::from_parts(
            al,
            3,
            0,
            &[0, 1, 2],
            &[(0, 0, 1), (1, 0, 1), (0, 1, 2), (2, 1, 2)],
        )
        .unwrap();
        let json = m.to_json();
        let back = Automaton::from_json(&json).unwrap();
        assert_eq!(back.to_json(), json);
        assert!(back.same_language_to(&m, 6).unwrap());
    }

    #[test]
    fn rejects_out_of_range_documents() {
        let bad = r#"{"alphabet":["a"],"states":1,"initial":0,"finals":[2],"transitions":[]}"#;
        assert!(Automaton::from_json(bad).is_err());
        let bad2 = r#"{"alphabet":["a"],"states":1,"initial":0,"finals":[0],"transitions":[[0,"z",0]]}"#;
        assert!(Automaton::from_json(bad2).is_err());
    }
}
