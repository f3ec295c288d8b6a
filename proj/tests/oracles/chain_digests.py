# Copyright 2026 The Genflow Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Recomputes scene-chain frame digests from the hashing rules alone.

Usage: chain_digests.py GOLDEN_JSON [--write]

Frame i >= 1 of an attempt is mix64(key + mix64(i)) where key is the
generator stream key of that attempt; frame 0 is the init frame. The last
attempt of a scene that never converges is attempt == retry_budget.
"""

import json
import sys

MASK = (1 << 64) - 1


def mix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def fnv1a(data):
    h = 0xCBF29CE484222325
    for b in data.encode():
        h ^= b
        h = (h * 0x100000001B3) & MASK
    return h


def nonnull(h):
    return h if h else 1


def child(key, label, index=None):
    k = mix64(key ^ fnv1a(label))
    if index is None:
        return k
    return mix64((k + index) & MASK)


def frames_for(duration_s, frame_rate=24):
    return max(1, round(duration_s * frame_rate))


def chain(seed, asset_label, durations, last_attempt):
    root = mix64(seed)
    init = nonnull(fnv1a(asset_label))
    scenes = []
    for k, d in enumerate(durations):
        gen = child(child(child(root, "scene", k), "attempt", last_attempt), "generator")
        n = frames_for(d)
        final = init if n == 1 else nonnull(mix64((gen + mix64(n - 1)) & MASK))
        scenes.append({"init": f"{init:016x}", "final": f"{final:016x}", "frames": n})
        init = final
    return scenes


def compute():
    durations = [1.0, 1.5, 2.0, 0.5]
    return {
        "seed": 3,
        "asset_label": "oracle-asset",
        "durations": durations,
        "clean": chain(3, "oracle-asset", durations, 0),
        "never_converges_budget_2": chain(3, "oracle-asset", durations, 2),
    }


def main():
    path = sys.argv[1]
    expected = compute()
    if "--write" in sys.argv[2:]:
        with open(path, "w") as f:
            json.dump(expected, f, indent=2)
            f.write("\n")
        return 0
    with open(path) as f:
        stored = json.load(f)
    if stored != expected:
        print(f"{path} does not match the recomputed digests")
        return 1
    print("chain digests match")
    return 0


if __name__ == "__main__":
    sys.exit(main())
