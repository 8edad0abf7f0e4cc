use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SmoKind {
    CopyTable,
    CreateTable,
    DecomposeTable,
    DropTable,
    JoinTable,
    MergeTable,
    PartitionTable,
    RenameTable,
    AddColumn,
    CopyColumn,
    DropColumn,
    MergeColumn,
    MoveColumn,
    RenameColumn,
    SplitColumn,
    Nop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SmoClass {
    I,
    II,
    III,
    IV,
}

impl fmt::Display for SmoClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SmoClass::I => "I",
            SmoClass::II => "II",
            SmoClass::III => "III",
            SmoClass::IV => "IV",
        })
    }
}

impl SmoKind {
    pub const ALL: [SmoKind; 16] = [
        SmoKind::CopyTable,
        SmoKind::CreateTable,
        SmoKind::DecomposeTable,
        SmoKind::DropTable,
        SmoKind::JoinTable,
        SmoKind::MergeTable,
        SmoKind::PartitionTable,
        SmoKind::RenameTable,
        SmoKind::AddColumn,
        SmoKind::CopyColumn,
        SmoKind::DropColumn,
        SmoKind::MergeColumn,
        SmoKind::MoveColumn,
        SmoKind::RenameColumn,
        SmoKind::SplitColumn,
        SmoKind::Nop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SmoKind::CopyTable => "COPY_TABLE",
            SmoKind::CreateTable => "CREATE_TABLE",
            SmoKind::DecomposeTable => "DECOMPOSE_TABLE",
            SmoKind::DropTable => "DROP_TABLE",
            SmoKind::JoinTable => "JOIN_TABLE",
            SmoKind::MergeTable => "MERGE_TABLE",
            SmoKind::PartitionTable => "PARTITION_TABLE",
            SmoKind::RenameTable => "RENAME_TABLE",
            SmoKind::AddColumn => "ADD_COLUMN",
            SmoKind::CopyColumn => "COPY_COLUMN",
            SmoKind::DropColumn => "DROP_COLUMN",
            SmoKind::MergeColumn => "MERGE_COLUMN",
            SmoKind::MoveColumn => "MOVE_COLUMN",
            SmoKind::RenameColumn => "RENAME_COLUMN",
            SmoKind::SplitColumn => "SPLIT_COLUMN",
            SmoKind::Nop => "NOP",
        }
    }

    /// Every class the operator belongs to; only MOVE_COLUMN has two.
    pub fn classes(self) -> &'static [SmoClass] {
        use SmoClass::*;
        match self {
            SmoKind::JoinTable => &[II],
            SmoKind::DecomposeTable
            | SmoKind::DropColumn
            | SmoKind::MergeColumn
            | SmoKind::SplitColumn => &[III],
            SmoKind::DropTable | SmoKind::MergeTable => &[IV],
            SmoKind::MoveColumn => &[II, III],
            _ => &[I],
        }
    }

    /// Operators with two alternative tgd formalizations.
    pub fn has_variants(self) -> bool {
        matches!(
            self,
            SmoKind::CopyTable | SmoKind::DecomposeTable | SmoKind::AddColumn | SmoKind::CopyColumn
        )
    }

    /// Name of the operator that undoes this one.
    pub fn inverse_operator(self) -> &'static str {
        match self {
            SmoKind::CopyTable => "DROP Table",
            SmoKind::CreateTable => "DROP Table",
            SmoKind::DecomposeTable => "ADD Column / JOIN Table",
            SmoKind::DropTable => "CREATE Table",
            SmoKind::JoinTable => "DECOMPOSE Table",
            SmoKind::MergeTable => "PARTITION Table",
            SmoKind::PartitionTable => "MERGE Table",
            SmoKind::RenameTable => "RENAME Table",
            SmoKind::AddColumn => "DROP Column",
            SmoKind::CopyColumn => "DROP Column",
            SmoKind::DropColumn => "ADD Column",
            SmoKind::MergeColumn => "SPLIT Column",
            SmoKind::MoveColumn => "MOVE Column",
            SmoKind::RenameColumn => "RENAME Column",
            SmoKind::SplitColumn => "MERGE Column",
            SmoKind::Nop => "NOP",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            SmoKind::CopyTable => "copies a table",
            SmoKind::CreateTable => "introduces a new, empty table",
            SmoKind::DecomposeTable => "splits a table into two projections",
            SmoKind::DropTable => "removes an existing table",
            SmoKind::JoinTable => "joins two tables on their common attributes",
            SmoKind::MergeTable => "unites two tables with the same attributes",
            SmoKind::PartitionTable => "splits a table by a selection condition",
            SmoKind::RenameTable => "renames a table",
            SmoKind::AddColumn => "adds a column filled by a constant or a function",
            SmoKind::CopyColumn => "copies a column to another table by a join condition",
            SmoKind::DropColumn => "removes a column",
            SmoKind::MergeColumn => "combines two columns by a function",
            SmoKind::MoveColumn => "moves a column to another table by a join condition",
            SmoKind::RenameColumn => "renames a column",
            SmoKind::SplitColumn => "splits a column in two by a function",
            SmoKind::Nop => "nothing happens",
        }
    }
}

impl fmt::Display for SmoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SmoKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SmoKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidSmo(format!("unknown operator {s:?}")))
    }
}

fn default_variant() -> u8 {
    1
}

fn is_default_variant(v: &u8) -> bool {
    *v == 1
}

/// One evolution step as written in a script.
///
/// Which parameters an operator reads:
///
/// | kind | parameters |
/// |---|---|
/// | COPY_TABLE | relation, targets (2) |
/// | CREATE_TABLE | target, attributes |
/// | DECOMPOSE_TABLE | relation, targets (2), column_groups (2) |
/// | DROP_TABLE | relation |
/// | JOIN_TABLE | relations (2), target |
/// | MERGE_TABLE | relations (2), target |
/// | PARTITION_TABLE | relation, targets (2), condition |
/// | RENAME_TABLE | relation, target |
/// | ADD_COLUMN | relation, target_column, value or function + columns; target |
/// | COPY_COLUMN | relation, target, columns (1), condition, target_column |
/// | DROP_COLUMN | relation, columns; target |
/// | MERGE_COLUMN | relation, columns (2), target_column, function; target |
/// | MOVE_COLUMN | relation, target, columns (1), condition, target_column |
/// | RENAME_COLUMN | relation, columns (1), target_column; target |
/// | SPLIT_COLUMN | relation, columns (1), target_columns (2), function; target |
///
/// For the column operators that rewrite one relation, an optional `target` renames it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoSpec {
    pub kind: SmoKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub columns: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_column: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub target_columns: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attributes: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub column_groups: Vec<Vec<String>>,
    #[serde(default = "default_variant", skip_serializing_if = "is_default_variant")]
    pub variant: u8,
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

impl SmoSpec {
    pub fn new(kind: SmoKind) -> Self {
        SmoSpec {
            kind,
            relation: None,
            relations: Vec::new(),
            target: None,
            targets: Vec::new(),
            columns: Vec::new(),
            target_column: None,
            target_columns: Vec::new(),
            function: None,
            value: None,
            condition: None,
            attributes: Vec::new(),
            column_groups: Vec::new(),
            variant: 1,
        }
    }

    pub fn class(&self) -> SmoClass {
        self.kind.classes()[0]
    }

    pub fn with_variant(mut self, variant: u8) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_target(mut self, target: &str) -> Self {
        self.target = Some(target.to_string());
        self
    }

    pub fn copy_table(relation: &str, first: &str, second: &str) -> Self {
        SmoSpec {
            relation: Some(relation.into()),
            targets: strings(&[first, second]),
            ..SmoSpec::new(SmoKind::CopyTable)
        }
    }

    pub fn create_table(target: &str, attributes: &[&str]) -> Self {
        SmoSpec {
            target: Some(target.into()),
            attributes: strings(attributes),
            ..SmoSpec::new(SmoKind::CreateTable)
        }
    }

    pub fn decompose_table(relation: &str, targets: [&str; 2], groups: [&[&str]; 2]) -> Self {
        SmoSpec {
            relation: Some(relation.into()),
            targets: strings(&targets),
            column_groups: groups.iter().map(|g| strings(g)).collect(),
            ..SmoSpec::new(SmoKind::DecomposeTable)
        }
    }

    pub fn drop_table(relation: &str) -> Self {
        SmoSpec {
            relation: Some(relation.into()),
            ..SmoSpec::new(SmoKind::DropTable)
        }
    }

    pub fn join_table(left: &str, right: &str, target: &str) -> Self {
        SmoSpec {
            relations: strings(&[left, right]),
            target: Some(target.into()),
            ..SmoSpec::new(SmoKind::JoinTable)
        }
    }

    pub fn merge_table(left: &str, right: &str, target: &str) -> Self {
        SmoSpec {
            relations: strings(&[left, right]),
            target: Some(target.into()),
            ..SmoSpec::new(SmoKind::MergeTable)
        }
    }

    pub fn partition_table(relation: &str, first: &str, second: &str, condition: &str) -> Self {
        SmoSpec {
            relation: Some(relation.into()),
            targets: strings(&[first, second]),
            condition: Some(condition.into()),
            ..SmoSpec::new(SmoKind::PartitionTable)
        }
    }

    pub fn rename_table(relation: &str, target: &str) -> Self {
        SmoSpec {
            relation: Some(relation.into()),
            target: Some(target.into()),
            ..SmoSpec::new(SmoKind::RenameTable)
        }
    }

    pub fn add_column_value(relation: &str, column: &str, value: &str) -> Self {
        SmoSpec {
            relation: Some(relation.into()),
            target_column: Some(column.into()),
            value: Some(value.into()),
            ..SmoSpec::new(SmoKind::AddColumn)
        }
    }

    pub fn add_column_function(relation: &str, column: &str, function: &str, inputs: &[&str]) -> Self {
        SmoSpec {
            relation: Some(relation.into()),
            target_column: Some(column.into()),
            function: Some(function.into()),
            columns: strings(inputs),
            ..SmoSpec::new(SmoKind::AddColumn)
        }
    }

    pub fn copy_column(relation: &str, target: &str, column: &str, condition: &str, new_column: &str) -> Self {
        SmoSpec {
            relation: Some(relation.into()),
            target: Some(target.into()),
            columns: strings(&[column]),
            condition: Some(condition.into()),
            target_column: Some(new_column.into()),
            ..SmoSpec::new(SmoKind::CopyColumn)
        }
    }

    pub fn move_column(relation: &str, target: &str, column: &str, condition: &str, new_column: &str) -> Self {
        SmoSpec {
            kind: SmoKind::MoveColumn,
            ..SmoSpec::copy_column(relation, target, column, condition, new_column)
        }
    }

    pub fn drop_column(relation: &str, columns: &[&str]) -> Self {
        SmoSpec {
            relation: Some(relation.into()),
            columns: strings(columns),
            ..SmoSpec::new(SmoKind::DropColumn)
        }
    }

    pub fn merge_column(relation: &str, columns: [&str; 2], new_column: &str, function: &str) -> Self {
        SmoSpec {
            relation: Some(relation.into()),
            columns: strings(&columns),
            target_column: Some(new_column.into()),
            function: Some(function.into()),
            ..SmoSpec::new(SmoKind::MergeColumn)
        }
    }

    pub fn rename_column(relation: &str, column: &str, new_column: &str) -> Self {
        SmoSpec {
            relation: Some(relation.into()),
            columns: strings(&[column]),
            target_column: Some(new_column.into()),
            ..SmoSpec::new(SmoKind::RenameColumn)
        }
    }

    pub fn split_column(relation: &str, column: &str, new_columns: [&str; 2], function: &str) -> Self {
        SmoSpec {
            relation: Some(relation.into()),
            columns: strings(&[column]),
            target_columns: strings(&new_columns),
            function: Some(function.into()),
            ..SmoSpec::new(SmoKind::SplitColumn)
        }
    }

    pub fn nop() -> Self {
        SmoSpec::new(SmoKind::Nop)
    }

    fn invalid(&self, msg: impl fmt::Display) -> Error {
        Error::InvalidSmo(format!("{}: {msg}", self.kind))
    }

    pub(crate) fn relation_param(&self) -> Result<&str> {
        self.relation
            .as_deref()
            .ok_or_else(|| self.invalid("missing \"relation\""))
    }

    pub(crate) fn target_param(&self) -> Result<&str> {
        self.target
            .as_deref()
            .ok_or_else(|| self.invalid("missing \"target\""))
    }

    pub(crate) fn target_column_param(&self) -> Result<&str> {
        self.target_column
            .as_deref()
            .ok_or_else(|| self.invalid("missing \"target_column\""))
    }

    pub(crate) fn function_param(&self) -> Result<&str> {
        self.function
            .as_deref()
            .ok_or_else(|| self.invalid("missing \"function\""))
    }

    pub(crate) fn condition_param(&self) -> Result<&str> {
        self.condition
            .as_deref()
            .ok_or_else(|| self.invalid("missing \"condition\""))
    }

    pub(crate) fn pair<'a>(&self, xs: &'a [String], name: &str) -> Result<[&'a str; 2]> {
        match xs {
            [a, b] => Ok([a.as_str(), b.as_str()]),
            _ => Err(self.invalid(format!("\"{name}\" needs exactly two entries"))),
        }
    }

    pub(crate) fn single<'a>(&self, xs: &'a [String], name: &str) -> Result<&'a str> {
        match xs {
            [a] => Ok(a.as_str()),
            _ => Err(self.invalid(format!("\"{name}\" needs exactly one entry"))),
        }
    }

    pub(crate) fn error(&self, msg: impl fmt::Display) -> Error {
        self.invalid(msg)
    }

    /// Checks the variant; parameter checks against a schema happen at compilation.
    pub fn validate_shape(&self) -> Result<()> {
        match self.variant {
            1 => Ok(()),
            2 if self.kind.has_variants() => Ok(()),
            v => Err(self.invalid(format!("has no formalization variant {v}"))),
        }
    }
}

/// An evolution script: `{"steps": [SmoSpec, ...]}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Script {
    pub steps: Vec<SmoSpec>,
}

impl Script {
    pub fn new(steps: Vec<SmoSpec>) -> Self {
        Script { steps }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let script: Script = serde_json::from_str(text)?;
        for s in &script.steps {
            s.validate_shape()?;
        }
        Ok(script)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("script serializes")
    }
}
