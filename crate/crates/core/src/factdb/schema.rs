//! On-disk document format. Each line of a fact file is one JSON document with the
//! fixed top-level fields below; optional fields are omitted when empty.

use serde::{Deserialize, Serialize};

use crate::local_algebra::Order;

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub prime: u64,
    /// Sphere dimension for a group entry; absent for fact-family documents.
    pub sphere: Option<u32>,
    /// Total degree m of π_m(Sⁿ); absent for fact-family documents.
    pub degree: Option<u32>,
    /// The entry holds for every sphere at least `sphere`, with the same stem.
    /// Generator names then use `{n}` placeholders.
    #[serde(default, skip_serializing_if = "is_false")]
    pub stable: bool,
    /// Only a subgroup (with its true orders) is listed. Good enough for kernels of maps
    /// into the group, not for quotients of it.
    #[serde(default, skip_serializing_if = "is_false")]
    pub partial: bool,
    pub generators: Vec<GeneratorSpec>,
    pub compositions: Vec<CompositionFact>,
    pub suspensions: Vec<SuspensionFact>,
    pub brackets: Vec<BracketFact>,
    pub orders: Vec<OrderFact>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub goals: Vec<GoalFact>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub citation: Option<String>,
}

impl Document {
    pub fn is_entry(&self) -> bool {
        self.sphere.is_some() && self.degree.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub order: OrderSpec,
}

/// A generator order: a power of the prime, or the string `inf`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderSpec {
    Finite(u64),
    Named(String),
}

impl OrderSpec {
    /// Exponent form, or `None` if the order is not a power of `p`.
    pub fn to_order(&self, p: u64) -> Option<Order> {
        match self {
            OrderSpec::Named(s) if s == "inf" => Some(Order::Infinite),
            OrderSpec::Named(_) => None,
            OrderSpec::Finite(n) => {
                let mut n = *n;
                let mut e = 0;
                if n == 0 {
                    return None;
                }
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                (n == 1).then_some(Order::Finite(e))
            }
        }
    }
}

/// `word = value` on every sphere in the range, or alternatives when the value is only
/// known up to the stated qualifier.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositionFact {
    pub id: String,
    pub word: String,
    /// Inclusive range for the `{n}` parameter; the upper end may be open.
    pub spheres: (u32, Option<u32>),
    /// One entry when determined; several when only a set of possibilities is known.
    pub values: Vec<String>,
    /// `exact`, `sign`, `unit` or `span`: how the alternatives arise.
    pub qualifier: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<String>,
    pub citation: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuspensionFact {
    pub id: String,
    /// (sphere, degree) of the source; the target is one higher in both.
    pub source: (u32, u32),
    /// Row i is the image of source generator i in target generator coordinates.
    pub matrix: Vec<Vec<i64>>,
    /// Any of `iso`, `mono`, `epi`.
    pub flags: Vec<String>,
    pub citation: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketFact {
    pub id: String,
    pub triple: (String, String, String),
    pub contains: String,
    pub indeterminacy: Vec<String>,
    pub citation: String,
}

/// Scope of a fact about the k-fold suspension: stem r, suspension range k.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalScope {
    pub r: u32,
    pub k: (u32, Option<u32>),
}

impl GoalScope {
    pub fn covers(&self, r: u32, k: u32) -> bool {
        self.r == r && k >= self.k.0 && self.k.1.is_none_or(|hi| k <= hi)
    }
}

/// Order and divisibility information. `kind` is one of
/// `at_least`, `exactly`, `no_element_of_order`, `lift_order`, `divisible`, `not_divisible`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderFact {
    pub id: String,
    pub element: String,
    pub kind: String,
    pub value: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scope: Option<GoalScope>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<String>,
    pub citation: String,
}

/// Facts tied to one derivation goal rather than to a sphere group.
///
/// `kind` is one of
/// `contains_goal` (value: the k of another goal whose group embeds here),
/// `fibre_lift_order` (element of the top-cell kernel, value: order of its lift),
/// `boundary` (element → value under the connecting map),
/// `fibre_kernel_image` (element of the top-cell group → its image under the fibre boundary),
/// `stable_value` (value: the group in module notation).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalFact {
    pub id: String,
    pub scope: GoalScope,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<String>,
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<String>,
    pub citation: String,
}

/// Serialize one document in normalized form (one line, fixed field order).
pub fn to_line(doc: &Document) -> String {
    serde_json::to_string(doc).expect("documents always serialize")
}

pub fn parse_line(line: &str) -> Result<Document, serde_json::Error> {
    serde_json::from_str(line)
}
