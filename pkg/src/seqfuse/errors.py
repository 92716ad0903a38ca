"""Package error taxonomy.

Plain ValueError covers violated invariants on otherwise well-formed inputs;
the classes here mark the two failure modes callers are expected to branch
on: documents that do not match the scenario schema, and numerical
procedures that did not converge to a trustworthy value.
"""


class SeqfuseError(Exception):
    pass


class SchemaError(SeqfuseError):
    """Scenario document is malformed (missing keys, wrong types, bad shape)."""


class NumericError(SeqfuseError):
    """A numerical routine failed to converge or produced an unusable value."""
