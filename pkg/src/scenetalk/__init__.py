"""scenetalk: a conversational accessibility runtime for 3D scenes.

The runtime keeps a semantic scene model, serializes it into an
accessibility-augmented scene graph for a language model on every query,
and executes the model's replies as programs in a small guarded scene
modification language, with spoken-feedback events throughout.
"""

__version__ = "0.1.0"

from .scene import AmbiguityError, NotFoundError, Scene, SceneHost
from .types import (
    AudioFacet,
    ColorRGBA,
    LightFacet,
    Player,
    SceneError,
    SceneObject,
    TextFacet,
    Vec3,
)

__all__ = [
    "AmbiguityError",
    "AudioFacet",
    "ColorRGBA",
    "LightFacet",
    "NotFoundError",
    "Player",
    "Scene",
    "SceneError",
    "SceneHost",
    "SceneObject",
    "TextFacet",
    "Vec3",
    "__version__",
]
