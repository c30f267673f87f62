//! JSON wire formats: field descriptions, module vectors, orbit labels,
//! witness words, and census files. Field elements travel as lowercase hex,
//! roots as comma-separated coordinate strings.

use crate::census::OrbitRecord;
use crate::error::{Error, Result};
use crate::gf2k::{make_field, Fel, Field};
use crate::invariants::OrbitLabel;
use crate::liealg::{ChevVec, GroupWord};
use crate::rootsys::{build_root_system, Root, RootSystemId};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::Arc;

pub const CENSUS_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldDto {
    pub k: u32,
    pub poly: String,
}

impl FieldDto {
    pub fn of(field: &Field) -> FieldDto {
        FieldDto {
            k: field.degree(),
            poly: format!("{:x}", field.poly()),
        }
    }

    pub fn to_field(&self) -> Result<Arc<Field>> {
        let field = make_field(self.k)?;
        let poly = u32::from_str_radix(&self.poly, 16)
            .map_err(|_| Error::Format(format!("bad polynomial {:?}", self.poly)))?;
        if poly != field.poly() {
            return Err(Error::Format(format!(
                "polynomial {poly:#x} is not the canonical one for degree {}",
                self.k
            )));
        }
        Ok(field)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChevVecDto {
    pub phi: String,
    pub field: FieldDto,
    pub e: BTreeMap<String, String>,
    pub h: Vec<String>,
}

impl ChevVecDto {
    pub fn of(v: &ChevVec) -> ChevVecDto {
        let sys = v.sys();
        let e = v
            .support_e()
            .map(|(i, c)| (sys.root_at(i).to_string(), c.to_hex()))
            .collect();
        let h = v.hpart().iter().map(|c| c.to_hex()).collect();
        ChevVecDto {
            phi: sys.id().to_string(),
            field: FieldDto::of(v.field()),
            e,
            h,
        }
    }

    pub fn to_chev(&self) -> Result<ChevVec> {
        let id: RootSystemId = self.phi.parse()?;
        let sys = build_root_system(id);
        let field = self.field.to_field()?;
        let mut v = ChevVec::zero(sys.clone(), field.clone());
        for (coords, hex) in &self.e {
            let root: Root = coords.parse()?;
            let c = Fel::from_hex(hex)?;
            if !field.contains(c) {
                return Err(Error::Format(format!(
                    "element {hex} outside GF(2^{})",
                    field.degree()
                )));
            }
            v.set_e(&root, c)?;
        }
        if self.h.len() != sys.rank() {
            return Err(Error::Format(format!(
                "Cartan part has {} entries, expected {}",
                self.h.len(),
                sys.rank()
            )));
        }
        for (i, hex) in self.h.iter().enumerate() {
            let c = Fel::from_hex(hex)?;
            if !field.contains(c) {
                return Err(Error::Format(format!(
                    "element {hex} outside GF(2^{})",
                    field.degree()
                )));
            }
            v.set_h(i, c);
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LabelDto {
    Zero,
    Singular,
    Shiny,
    Luminous,
    Fam { s: String, class: String },
}

impl LabelDto {
    pub fn of(label: OrbitLabel) -> LabelDto {
        match label {
            OrbitLabel::Zero => LabelDto::Zero,
            OrbitLabel::Singular => LabelDto::Singular,
            OrbitLabel::Shiny => LabelDto::Shiny,
            OrbitLabel::Luminous => LabelDto::Luminous,
            OrbitLabel::Fam { s, class } => LabelDto::Fam {
                s: s.to_hex(),
                class: class.to_hex(),
            },
        }
    }

    pub fn to_label(&self) -> Result<OrbitLabel> {
        Ok(match self {
            LabelDto::Zero => OrbitLabel::Zero,
            LabelDto::Singular => OrbitLabel::Singular,
            LabelDto::Shiny => OrbitLabel::Shiny,
            LabelDto::Luminous => OrbitLabel::Luminous,
            LabelDto::Fam { s, class } => OrbitLabel::Fam {
                s: Fel::from_hex(s)?,
                class: Fel::from_hex(class)?,
            },
        })
    }
}

/// Witness words serialize as a list of `[coords, hex]` factor pairs.
pub fn word_to_dto(w: &GroupWord) -> Vec<(String, String)> {
    w.factors
        .iter()
        .map(|(r, a)| (r.to_string(), a.to_hex()))
        .collect()
}

pub fn word_from_dto(pairs: &[(String, String)]) -> Result<GroupWord> {
    let factors = pairs
        .iter()
        .map(|(coords, hex)| Ok((coords.parse::<Root>()?, Fel::from_hex(hex)?)))
        .collect::<Result<_>>()?;
    Ok(GroupWord { factors })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitDto {
    pub label: LabelDto,
    pub rep: ChevVecDto,
    pub size: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CensusFileDto {
    pub version: u32,
    pub phi: String,
    pub field: FieldDto,
    pub orbits: Vec<OrbitDto>,
}

impl CensusFileDto {
    pub fn of(records: &[OrbitRecord]) -> Result<CensusFileDto> {
        let first = records
            .first()
            .ok_or_else(|| Error::Format("empty census".into()))?;
        Ok(CensusFileDto {
            version: CENSUS_VERSION,
            phi: first.representative.sys().id().to_string(),
            field: FieldDto::of(first.representative.field()),
            orbits: records
                .iter()
                .map(|r| OrbitDto {
                    label: LabelDto::of(r.label),
                    rep: ChevVecDto::of(&r.representative),
                    size: r.size,
                })
                .collect(),
        })
    }

    pub fn to_records(&self) -> Result<Vec<OrbitRecord>> {
        if self.version != CENSUS_VERSION {
            return Err(Error::Version(self.version));
        }
        self.orbits
            .iter()
            .map(|o| {
                Ok(OrbitRecord {
                    label: o.label.to_label()?,
                    representative: o.rep.to_chev()?,
                    size: o.size,
                })
            })
            .collect()
    }
}
