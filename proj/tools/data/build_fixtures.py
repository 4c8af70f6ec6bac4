#!/usr/bin/env python3
# Copyright 2026 The geotweet Authors
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

"""Regenerate the bundled geocoding fixtures under core/data/.

Inputs (not vendored):
  * world-atlas 2.x (npm)       -> countries-50m.json  (Natural Earth 1:50m, public domain)
  * geonamescache 3.x (PyPI)    -> data/cities15000.json, countries.json, us_states.json
                                   (GeoNames, CC-BY 4.0)

Usage: build_fixtures.py <countries-50m.json> <geonamescache data dir> <out dir>
"""
import json
import sys
import unicodedata
from collections import defaultdict

MIN_POPULATION = 50000


def decode_topojson(path):
    """Yields (properties, id, rings) per geometry of objects.countries."""
    topo = json.load(open(path))
    sx, sy = topo["transform"]["scale"]
    tx, ty = topo["transform"]["translate"]
    arcs = []
    for arc in topo["arcs"]:
        x = y = 0
        pts = []
        for dx, dy in arc:
            x += dx
            y += dy
            pts.append((x * sx + tx, y * sy + ty))
        arcs.append(pts)

    def ring(indices):
        out = []
        for i in indices:
            pts = arcs[i] if i >= 0 else list(reversed(arcs[~i]))
            out.extend(pts if not out else pts[1:])
        return out

    for geom in topo["objects"]["countries"]["geometries"]:
        if geom["type"] == "Polygon":
            polys = [geom["arcs"]]
        elif geom["type"] == "MultiPolygon":
            polys = geom["arcs"]
        else:
            continue
        rings = [ring(r) for poly in polys for r in poly]
        yield geom.get("properties", {}), geom.get("id"), rings


def strip_accents(s):
    return "".join(c for c in unicodedata.normalize("NFKD", s) if not unicodedata.combining(c))


def normalize(s):
    # ASCII-only case folding, identical to the C++ normalize_place().
    s = "".join(c.lower() if "A" <= c <= "Z" else c for c in s)
    return " ".join(s.split())


def main():
    topo_path, gn_dir, out = sys.argv[1:4]
    countries = json.load(open(gn_dir + "/countries.json"))
    numeric_to_iso2 = {"%03d" % c["isonumeric"]: c["iso"] for c in countries.values()}
    # Natural Earth entities without an ISO 3166 numeric code of their own.
    by_name = {"Kosovo": "XK", "N. Cyprus": "CY", "Somaliland": "SO", "Indian Ocean Ter.": "AU",
               "Ashmore and Cartier Is.": "AU", "Siachen Glacier": "IN"}

    with open(out + "/boundaries.tsv", "w", encoding="utf-8") as f:
        f.write("# Country boundaries, Natural Earth 1:50m via world-atlas (public domain).\n")
        f.write("# alpha2<TAB>ring_id<TAB>lon,lat lon,lat ...\n")
        rows = []
        next_ring = defaultdict(int)
        for props, gid, rings in decode_topojson(topo_path):
            name = props.get("name", "")
            cc = numeric_to_iso2.get(gid) or by_name.get(name)
            if cc is None:
                print("skipping unmapped geometry", gid, name, file=sys.stderr)
                continue
            for ring in rings:
                ring_id = next_ring[cc]
                next_ring[cc] += 1
                coords = " ".join("%.4f,%.4f" % (lon, lat) for lon, lat in ring)
                rows.append((cc, ring_id, coords))
        for cc, ring_id, coords in sorted(rows, key=lambda r: (r[0], r[1])):
            f.write("%s\t%d\t%s\n" % (cc, ring_id, coords))

    cities = json.load(open(gn_dir + "/cities15000.json"))
    best = {}
    ascii_best = {}
    points = []
    for c in cities.values():
        if c["population"] < MIN_POPULATION:
            continue
        points.append((c["latitude"], c["longitude"], c["countrycode"], c["name"]))
        key = normalize(c["name"])
        if len(key) < 3:
            continue
        if key not in best or c["population"] > best[key][1]:
            best[key] = (c["countrycode"], c["population"], "geonames city")
        plain = normalize(strip_accents(c["name"]))
        if plain != key and (plain not in ascii_best or c["population"] > ascii_best[plain][1]):
            ascii_best[plain] = (c["countrycode"], c["population"], "geonames city, accents stripped")

    names = {}
    for key, (cc, _, note) in best.items():
        names[key] = (cc, note)
    for key, (cc, _, note) in ascii_best.items():
        names.setdefault(key, (cc, note))
    for c in countries.values():
        names[normalize(c["name"])] = (c["iso"], "country name")
    for s in json.load(open(gn_dir + "/us_states.json")).values():
        key = normalize(s["name"])
        names.setdefault(key, ("US", "us state"))

    with open(out + "/gazetteer.tsv", "w", encoding="utf-8") as f:
        f.write("# Place names -> ISO 3166-1 alpha-2. GeoNames (CC-BY 4.0), cities >= %d inhabitants,\n" % MIN_POPULATION)
        f.write("# country names and US states. Ambiguous city names resolve to the most populous match.\n")
        for key in sorted(names):
            if "\t" in key or "#" == key[0]:
                continue
            cc, note = names[key]
            f.write("%s\t%s\t%s\n" % (key, cc, note))

    with open(out + "/places.tsv", "w", encoding="utf-8") as f:
        f.write("# Populated places for nearest-point reverse lookup. GeoNames (CC-BY 4.0).\n")
        f.write("# lat<TAB>lon<TAB>alpha2<TAB>name\n")
        for lat, lon, cc, name in sorted(points, key=lambda p: (p[2], p[3], p[0], p[1])):
            f.write("%.5f\t%.5f\t%s\t%s\n" % (lat, lon, cc, name))

    with open(out + "/regions/europe.txt", "w", encoding="utf-8") as f:
        f.write("# Europe region preset: GeoNames continent code EU. Edit freely.\n")
        for cc in sorted(c["iso"] for c in countries.values() if c["continentcode"] == "EU" and c["iso"] != "CS"):
            f.write(cc + "\n")


if __name__ == "__main__":
    main()
