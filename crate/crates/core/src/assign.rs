// SPDX-License-Identifier: Apache-2.0

//! Input vectors applied to a network.
//!
//! An [`InputAssignment`] is an evaluation-phase vector: every input pair is
//! complementary. A [`PartialAssignment`] additionally lets a pair sit in the
//! 0-0 precharge state. Both keep their entries in the network's input
//! order, so the derived ordering counts in binary with the first input as
//! the most significant digit.

use std::fmt;

use serde::ser::{Serialize, SerializeMap, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InputAssignment {
    entries: Vec<(String, bool)>,
}

impl InputAssignment {
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, bool)>,
        S: Into<String>,
    {
        InputAssignment {
            entries: pairs.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    /// Bit `n - 1 - i` of `bits` is the value of `names[i]`.
    pub fn from_bits<S: AsRef<str>>(names: &[S], bits: u64) -> Self {
        let n = names.len();
        InputAssignment {
            entries: names
                .iter()
                .enumerate()
                .map(|(i, name)| (name.as_ref().to_string(), (bits >> (n - 1 - i)) & 1 == 1))
                .collect(),
        }
    }

    /// All 2ⁿ assignments in counting order.
    pub fn all<S: AsRef<str>>(names: &[S]) -> impl Iterator<Item = InputAssignment> + '_ {
        assert!(names.len() < 64, "too many inputs to enumerate");
        (0..1u64 << names.len()).map(move |bits| InputAssignment::from_bits(names, bits))
    }

    pub fn get(&self, input: &str) -> Option<bool> {
        self.entries.iter().find(|(k, _)| k == input).map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, bool)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Compact value string, e.g. `"01"` for A=0,B=1.
    pub fn bit_string(&self) -> String {
        self.entries.iter().map(|(_, v)| if *v { '1' } else { '0' }).collect()
    }
}

impl fmt::Display for InputAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={}", u8::from(*v))?;
        }
        Ok(())
    }
}

impl Serialize for InputAssignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (k, v) in &self.entries {
            map.serialize_entry(k, &u8::from(*v))?;
        }
        map.end()
    }
}

/// State of one input pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum InputState {
    Zero,
    One,
    /// Both rails at 0.
    Precharge,
}

impl InputState {
    /// Rail value for the given polarity; precharge holds both rails low.
    pub fn rail(self, polarity: crate::boolexpr::Polarity) -> bool {
        match self {
            InputState::Zero => polarity.rail(false),
            InputState::One => polarity.rail(true),
            InputState::Precharge => false,
        }
    }
}

impl From<bool> for InputState {
    fn from(v: bool) -> Self {
        if v {
            InputState::One
        } else {
            InputState::Zero
        }
    }
}

impl fmt::Display for InputState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputState::Zero => "0",
            InputState::One => "1",
            InputState::Precharge => "P",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialAssignment {
    entries: Vec<(String, InputState)>,
}

impl PartialAssignment {
    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, InputState)>,
        S: Into<String>,
    {
        PartialAssignment {
            entries: pairs.into_iter().map(|(k, v)| (k.into(), v)).collect(),
        }
    }

    pub fn all_precharge<S: AsRef<str>>(names: &[S]) -> Self {
        PartialAssignment {
            entries: names
                .iter()
                .map(|n| (n.as_ref().to_string(), InputState::Precharge))
                .collect(),
        }
    }

    /// Every assignment with at least one input in precharge (3ⁿ − 2ⁿ of
    /// them), in base-3 counting order.
    pub fn all_with_precharge<S: AsRef<str>>(names: &[S]) -> impl Iterator<Item = PartialAssignment> + '_ {
        let n = names.len();
        let total = 3u64.checked_pow(n as u32).expect("too many inputs to enumerate");
        (0..total).filter_map(move |mut code| {
            let mut states = vec![InputState::Zero; n];
            for slot in states.iter_mut().rev() {
                *slot = match code % 3 {
                    0 => InputState::Zero,
                    1 => InputState::One,
                    _ => InputState::Precharge,
                };
                code /= 3;
            }
            if !states.contains(&InputState::Precharge) {
                return None;
            }
            Some(PartialAssignment {
                entries: names.iter().map(|s| s.as_ref().to_string()).zip(states).collect(),
            })
        })
    }

    pub fn get(&self, input: &str) -> Option<InputState> {
        self.entries.iter().find(|(k, _)| k == input).map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, InputState)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn has_precharge(&self) -> bool {
        self.entries.iter().any(|(_, v)| *v == InputState::Precharge)
    }
}

impl From<&InputAssignment> for PartialAssignment {
    fn from(a: &InputAssignment) -> Self {
        PartialAssignment {
            entries: a
                .entries
                .iter()
                .map(|(k, v)| (k.clone(), InputState::from(*v)))
                .collect(),
        }
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

impl Serialize for PartialAssignment {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (k, v) in &self.entries {
            match v {
                InputState::Zero => map.serialize_entry(k, &0u8)?,
                InputState::One => map.serialize_entry(k, &1u8)?,
                InputState::Precharge => map.serialize_entry(k, "precharge")?,
            }
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_order_has_first_input_most_significant() {
        let all: Vec<String> = InputAssignment::all(&["A", "B"]).map(|a| a.bit_string()).collect();
        assert_eq!(all, ["00", "01", "10", "11"]);
        let mut sorted = InputAssignment::all(&["A", "B"]).collect::<Vec<_>>();
        sorted.reverse();
        sorted.sort();
        assert_eq!(sorted[1].to_string(), "A=0,B=1");
    }

    #[test]
    fn partial_enumeration_size() {
        for n in 0..6 {
            let names: Vec<String> = (0..n).map(|i| format!("I{i}")).collect();
            let count = PartialAssignment::all_with_precharge(&names).count();
            assert_eq!(count, 3usize.pow(n as u32) - 2usize.pow(n as u32));
            assert!(PartialAssignment::all_with_precharge(&names).all(|p| p.has_precharge()));
        }
    }

    #[test]
    fn serializes_in_input_order() {
        let a = InputAssignment::from_pairs([("B", true), ("A", false)]);
        assert_eq!(serde_json::to_string(&a).unwrap(), r#"{"B":1,"A":0}"#);
        let p = PartialAssignment::from_pairs([("A", InputState::Precharge), ("B", InputState::Zero)]);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"A":"precharge","B":0}"#);
        assert_eq!(p.to_string(), "A=P,B=0");
    }
}
