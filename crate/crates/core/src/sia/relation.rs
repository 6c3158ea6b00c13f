use std::fmt;
use std::ops::{BitAnd, BitOr, Not};
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::point::{EndpointEncoding, PointRelation};
use super::{SiaError, SiaNetwork};

/// One of Allen's thirteen basic relations between proper intervals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum BasicRelation {
    Before = 0,
    Meets,
    Overlaps,
    Starts,
    During,
    Finishes,
    Equals,
    After,
    MetBy,
    OverlappedBy,
    StartedBy,
    Contains,
    FinishedBy,
}

impl BasicRelation {
    pub const ALL: [BasicRelation; 13] = [
        BasicRelation::Before,
        BasicRelation::Meets,
        BasicRelation::Overlaps,
        BasicRelation::Starts,
        BasicRelation::During,
        BasicRelation::Finishes,
        BasicRelation::Equals,
        BasicRelation::After,
        BasicRelation::MetBy,
        BasicRelation::OverlappedBy,
        BasicRelation::StartedBy,
        BasicRelation::Contains,
        BasicRelation::FinishedBy,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> &'static str {
        use BasicRelation::*;
        match self {
            Before => "b",
            Meets => "m",
            Overlaps => "o",
            Starts => "s",
            During => "d",
            Finishes => "f",
            Equals => "e",
            After => "bi",
            MetBy => "mi",
            OverlappedBy => "oi",
            StartedBy => "si",
            Contains => "di",
            FinishedBy => "fi",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|b| b.symbol() == s)
    }

    pub fn converse(self) -> Self {
        use BasicRelation::*;
        match self {
            Before => After,
            Meets => MetBy,
            Overlaps => OverlappedBy,
            Starts => StartedBy,
            During => Contains,
            Finishes => FinishedBy,
            Equals => Equals,
            After => Before,
            MetBy => Meets,
            OverlappedBy => Overlaps,
            StartedBy => Starts,
            Contains => During,
            FinishedBy => Finishes,
        }
    }

    /// The defining endpoint order of `X rel Y` as
    /// `[X⁻?Y⁻, X⁻?Y⁺, X⁺?Y⁻, X⁺?Y⁺]`.
    pub fn endpoints(self) -> [PointRelation; 4] {
        use BasicRelation::*;
        const L: PointRelation = PointRelation::LT;
        const E: PointRelation = PointRelation::EQ;
        const G: PointRelation = PointRelation::GT;
        match self {
            Before => [L, L, L, L],
            Meets => [L, L, E, L],
            Overlaps => [L, L, G, L],
            Starts => [E, L, G, L],
            During => [G, L, G, L],
            Finishes => [G, L, G, E],
            Equals => [E, L, G, E],
            After => [G, G, G, G],
            MetBy => [G, E, G, G],
            OverlappedBy => [G, L, G, G],
            StartedBy => [E, L, G, G],
            Contains => [L, L, G, G],
            FinishedBy => [L, L, G, E],
        }
    }
}

impl fmt::Display for BasicRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A disjunction of basic relations, stored as a 13-bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct RelationSet(u16);

impl RelationSet {
    pub const EMPTY: RelationSet = RelationSet(0);
    pub const ALL: RelationSet = RelationSet(0x1FFF);
    /// Pairs sharing a common subinterval: everything except b, m, bi, mi.
    pub const CONT: RelationSet = RelationSet(
        0x1FFF
            & !(1 << BasicRelation::Before as u16)
            & !(1 << BasicRelation::Meets as u16)
            & !(1 << BasicRelation::After as u16)
            & !(1 << BasicRelation::MetBy as u16),
    );

    pub fn from_bits(bits: u16) -> Self {
        RelationSet(bits & 0x1FFF)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn single(b: BasicRelation) -> Self {
        RelationSet(1 << b as u16)
    }

    pub fn of(items: &[BasicRelation]) -> Self {
        items.iter().fold(Self::EMPTY, |acc, b| acc | Self::single(*b))
    }

    pub fn contains(self, b: BasicRelation) -> bool {
        self.0 & (1 << b as u16) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset(self, other: RelationSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = BasicRelation> {
        BasicRelation::ALL.into_iter().filter(move |b| self.contains(*b))
    }

    pub fn converse(self) -> Self {
        self.iter().fold(Self::EMPTY, |acc, b| acc | Self::single(b.converse()))
    }

    pub fn compose(self, other: RelationSet) -> Self {
        let table = composition_table();
        let mut out = 0u16;
        for a in self.iter() {
            for b in other.iter() {
                out |= table[a.index()][b.index()];
            }
        }
        RelationSet(out)
    }

    /// Per-entry convex hull of the endpoint orders of the members.
    pub fn encode_closure(self) -> EndpointEncoding {
        let mut entries = [PointRelation::EMPTY; 4];
        for b in self.iter() {
            for (slot, r) in entries.iter_mut().zip(b.endpoints()) {
                *slot = *slot | r;
            }
        }
        EndpointEncoding::new(entries.map(PointRelation::hull))
    }

    /// True when the set is exactly a conjunction of convex endpoint relations.
    pub fn is_sia(self) -> bool {
        self.encode_closure().decode() == self
    }

    pub fn encode(self) -> Result<EndpointEncoding, SiaError> {
        let enc = self.encode_closure();
        if enc.decode() == self {
            Ok(enc)
        } else {
            Err(SiaError::NotSia(self))
        }
    }
}

impl BitOr for RelationSet {
    type Output = RelationSet;
    fn bitor(self, rhs: Self) -> Self {
        RelationSet(self.0 | rhs.0)
    }
}

impl BitAnd for RelationSet {
    type Output = RelationSet;
    fn bitand(self, rhs: Self) -> Self {
        RelationSet(self.0 & rhs.0)
    }
}

impl Not for RelationSet {
    type Output = RelationSet;
    fn not(self) -> Self {
        RelationSet(!self.0 & 0x1FFF)
    }
}

impl From<BasicRelation> for RelationSet {
    fn from(b: BasicRelation) -> Self {
        RelationSet::single(b)
    }
}

impl fmt::Display for RelationSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == RelationSet::CONT {
            return f.write_str("{cont}");
        }
        if *self == RelationSet::ALL {
            return f.write_str("{all}");
        }
        f.write_str("{")?;
        for (i, b) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(b.symbol())?;
        }
        f.write_str("}")
    }
}

impl FromStr for RelationSet {
    type Err = SiaError;

    /// Accepts `{o, fi, di}`, `{cont}`, `{all}` and the bare words `cont`, `all`, `I`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let inner = match t.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
            Some(inner) => inner,
            None if matches!(t, "cont" | "all" | "I") => t,
            None => return Err(SiaError::Malformed(s.to_string())),
        };
        let mut out = RelationSet::EMPTY;
        for tok in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            out = out
                | match tok {
                    "cont" => RelationSet::CONT,
                    "all" | "I" => RelationSet::ALL,
                    sym => BasicRelation::from_symbol(sym)
                        .map(RelationSet::single)
                        .ok_or_else(|| SiaError::UnknownSymbol(sym.to_string()))?,
                };
        }
        Ok(out)
    }
}

impl Serialize for RelationSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RelationSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Basic-pair composition, derived once from the endpoint encodings by
/// propagating a three-interval point network.
pub fn composition_table() -> &'static [[u16; 13]; 13] {
    static TABLE: OnceLock<[[u16; 13]; 13]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [[0u16; 13]; 13];
        for a in BasicRelation::ALL {
            for b in BasicRelation::ALL {
                let mut net = SiaNetwork::new();
                let x = net.add_variable("x").expect("fresh node");
                let y = net.add_variable("y").expect("fresh node");
                let z = net.add_variable("z").expect("fresh node");
                net.constrain(x, y, a.into()).expect("basic relations are SIA");
                net.constrain(y, z, b.into()).expect("basic relations are SIA");
                let solved = net.solve().expect("basic pairs always compose");
                table[a.index()][b.index()] = solved.relation(x, z).bits();
            }
        }
        table
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use BasicRelation::*;

    #[test]
    fn converse_examples() {
        assert_eq!(RelationSet::single(Before).converse(), RelationSet::single(After));
        assert_eq!(RelationSet::ALL.converse(), RelationSet::ALL);
        assert_eq!(
            RelationSet::of(&[Overlaps, FinishedBy, Contains]).converse(),
            RelationSet::of(&[OverlappedBy, Finishes, During])
        );
    }

    #[test]
    fn compose_examples() {
        let o = RelationSet::single(Overlaps);
        assert_eq!(RelationSet::single(Equals).compose(o), o);
        assert_eq!(
            RelationSet::single(Before).compose(Before.into()),
            RelationSet::single(Before)
        );
        assert_eq!(o.compose(o), RelationSet::of(&[Before, Meets, Overlaps]));
    }

    #[test]
    fn encode_examples() {
        let enc = RelationSet::single(Equals).encode().unwrap();
        assert_eq!(enc.entries(), Equals.endpoints());

        let ofd = RelationSet::of(&[Overlaps, FinishedBy, Contains]);
        let enc = ofd.encode().unwrap();
        use PointRelation as P;
        assert_eq!(enc.entries(), [P::LT, P::LT, P::GT, P::ALL]);
        assert_eq!(enc.decode(), ofd);

        let enc = RelationSet::CONT.encode().unwrap();
        assert_eq!(enc.entries(), [P::ALL, P::LT, P::GT, P::ALL]);
    }

    #[test]
    fn decode_examples() {
        use PointRelation as P;
        let only_start = EndpointEncoding::new([P::LT, P::ALL, P::ALL, P::ALL]);
        assert_eq!(
            only_start.decode(),
            RelationSet::of(&[Before, Meets, Overlaps, FinishedBy, Contains])
        );
        assert_eq!(EndpointEncoding::new([P::ALL; 4]).decode(), RelationSet::ALL);
    }

    #[test]
    fn is_sia_examples() {
        assert!(RelationSet::of(&[Overlaps, FinishedBy, Contains]).is_sia());
        assert!(!RelationSet::of(&[Before, After]).is_sia());
        assert!(RelationSet::ALL.is_sia());
        assert!(RelationSet::CONT.is_sia());
        assert!(matches!(
            RelationSet::of(&[Before, After]).encode(),
            Err(SiaError::NotSia(_))
        ));
    }

    #[test]
    fn parse_and_display() {
        let r: RelationSet = "{o, fi, di}".parse().unwrap();
        assert_eq!(r, RelationSet::of(&[Overlaps, FinishedBy, Contains]));
        assert_eq!(r.to_string(), "{o, di, fi}");
        assert_eq!("{cont}".parse::<RelationSet>().unwrap(), RelationSet::CONT);
        assert_eq!(RelationSet::CONT.to_string(), "{cont}");
        assert_eq!("{}".parse::<RelationSet>().unwrap(), RelationSet::EMPTY);
        assert!("{xx}".parse::<RelationSet>().is_err());
        assert!("o".parse::<RelationSet>().is_err());
    }
}
