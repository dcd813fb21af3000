"""Abstract base model shared by every klconc domain type."""
# pylint: disable=too-few-public-methods
from typing import Any, Dict

from pydantic import BaseModel

from klconc.utils import canonical_json


class KLConcBaseModel(BaseModel):
    """Base class for immutable, JSON-exportable domain values.

    Instances are frozen (and therefore hashable), so they can be shared freely between threads and used as cache keys.
    """

    class Config:
        frozen = True
        arbitrary_types_allowed = True

    def to_dict(self) -> Dict[str, Any]:
        """Return the JSON-ready representation of this value.

        Subclasses override this when their wire format differs from the field layout.
        """
        return self.dict()

    def to_json(self) -> str:
        """Render this value as canonical JSON (sorted keys, 17 significant digits)."""
        return canonical_json(self.to_dict())
