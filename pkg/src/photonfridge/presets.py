"""Named parameter presets shipping with the package.

Each preset is a TOML file under photonfridge/presets/ with a [params]
table holding the physical inputs (plus circuit fields where relevant),
optional [sweep]/[mc]/[teff] tables with subcommand defaults, and an
`assumed` list naming every parameter that is an artifact choice rather
than a stated source value.
"""

from __future__ import annotations

from importlib import resources

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - runtime floor is 3.10
    import tomli as tomllib


def _preset_dir():
    return resources.files("photonfridge") / "presets"


def preset_names() -> list:
    """Sorted names of the shipped presets."""
    return sorted(
        entry.name[: -len(".toml")]
        for entry in _preset_dir().iterdir()
        if entry.name.endswith(".toml")
    )


def load_preset(name: str) -> dict:
    """Full preset mapping: params, optional subcommand tables, assumed list."""
    path = _preset_dir() / f"{name}.toml"
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}"
        ) from None
    data = tomllib.loads(text)
    if "params" not in data:
        raise ValueError(f"preset {name!r} has no [params] table")
    return data


def preset_params(name: str) -> dict:
    """Just the [params] table of a preset."""
    return dict(load_preset(name)["params"])
