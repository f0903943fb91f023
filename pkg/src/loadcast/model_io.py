"""Model persistence: decimal JSON files that round-trip weights bit-exactly.

Floats are serialized with Python's shortest-round-trip repr, which is
guaranteed to restore the identical IEEE-754 double on load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataset import NormParams
from .fileio import atomic_write_text
from .networks import NetworkState, StructureSpec

MODEL_SCHEMA_VERSION = 1


@dataclass
class ModelBundle:
    """Everything needed to forecast: network, scaling, window delay, provenance."""

    network: NetworkState
    norm: NormParams
    delay: int
    provenance: dict


def model_to_json(bundle: ModelBundle) -> str:
    net = bundle.network
    structure = net.structure
    payload = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "family": net.family,
        "structure": {
            "network_number": structure.network_number,
            "layer1_neurons": structure.layer1_neurons,
            "layer2_neurons": structure.layer2_neurons,
            "output_neurons": structure.output_neurons,
        },
        "activations": list(net.activations),
        "input_count": net.input_count,
        "delay": bundle.delay,
        "norm": {"min_kw": bundle.norm.min_kw, "max_kw": bundle.norm.max_kw},
        "weights": [w.tolist() for w in net.weights],
        "biases": [b.tolist() for b in net.biases],
        "recurrent_weights": (
            None if net.recurrent_weights is None else net.recurrent_weights.tolist()
        ),
        "context": None if net.context is None else net.context.tolist(),
        "provenance": bundle.provenance,
    }
    return json.dumps(payload, indent=2) + "\n"


def save_model(bundle: ModelBundle, path: str) -> None:
    atomic_write_text(path, model_to_json(bundle))


def model_from_json(text: str) -> ModelBundle:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"model file is not valid JSON: {exc}") from None
    version = payload.get("schema_version")
    if version != MODEL_SCHEMA_VERSION:
        raise ValueError(
            f"unsupported model schema version {version!r} "
            f"(expected {MODEL_SCHEMA_VERSION})"
        )
    try:
        structure = StructureSpec(
            layer1_neurons=payload["structure"]["layer1_neurons"],
            layer2_neurons=payload["structure"]["layer2_neurons"],
            output_neurons=payload["structure"]["output_neurons"],
            network_number=payload["structure"]["network_number"],
        )
        recurrent = payload["recurrent_weights"]
        context = payload["context"]
        network = NetworkState(
            family=payload["family"],
            structure=structure,
            input_count=payload["input_count"],
            weights=[np.array(w, dtype=float) for w in payload["weights"]],
            biases=[np.array(b, dtype=float) for b in payload["biases"]],
            activations=tuple(payload["activations"]),
            recurrent_weights=None if recurrent is None else np.array(recurrent, dtype=float),
            context=None if context is None else np.array(context, dtype=float),
        )
        norm = NormParams(
            min_kw=payload["norm"]["min_kw"], max_kw=payload["norm"]["max_kw"]
        )
        delay = int(payload["delay"])
        provenance = payload.get("provenance", {})
    except (KeyError, TypeError) as exc:
        raise ValueError(f"model file is missing or has a malformed field: {exc}") from None
    return ModelBundle(network=network, norm=norm, delay=delay, provenance=provenance)


def load_model(path: str) -> ModelBundle:
    with open(path, "r", encoding="utf-8") as handle:
        return model_from_json(handle.read())
