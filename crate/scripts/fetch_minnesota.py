#!/usr/bin/env python3
"""Write the Minnesota road network as an `i,j,weight` edge list.

The adjacency matrix ships inside the PyGSP wheel
(pygsp/data/pointclouds/minnesota.mat). The wheel is fetched with
`pip download`, so only pip and scipy are needed. Node ids are 1-based
row indices of the matrix; every edge gets weight 1 (the experiment assigns
its own weights). The raw matrix has 2642 nodes and 3303 edges in two
components; the roadmap experiment keeps the larger one.

usage: fetch_minnesota.py OUT.csv
"""

import io
import subprocess
import sys
import tempfile
import zipfile
from pathlib import Path

import scipy.io
import scipy.sparse


def main() -> None:
    if len(sys.argv) != 2:
        sys.exit(__doc__)
    out = Path(sys.argv[1])
    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run(
            [sys.executable, "-m", "pip", "download", "--no-deps", "-q", "-d", tmp, "pygsp==0.6.1"],
            check=True,
        )
        wheel = next(Path(tmp).glob("*.whl"))
        with zipfile.ZipFile(wheel) as z:
            data = scipy.io.loadmat(io.BytesIO(z.read("pygsp/data/pointclouds/minnesota.mat")))
    upper = scipy.sparse.triu(scipy.sparse.csr_matrix(data["A"]), k=1).tocoo()
    edges = sorted(zip(upper.row.tolist(), upper.col.tolist()))
    with out.open("w") as f:
        f.write("# Minnesota road network, from the PyGSP 0.6.1 wheel\n")
        f.write("i,j,weight\n")
        for i, j in edges:
            f.write(f"{i + 1},{j + 1},1\n")
    print(f"{out}: {data['A'].shape[0]} nodes, {len(edges)} edges")


if __name__ == "__main__":
    main()
