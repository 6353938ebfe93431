"""Print which sextic hypersurfaces get a divisibility certificate.

Run with ``python3 demos/certify_table.py``.
"""

from torsionkit.certify import CIQuery, certify_ci


def main():
    print(f"{'D':>3} {'r':>3}  theorem       n")
    for D in range(3, 31):
        cert = certify_ci(CIQuery((6,), D, 2))
        n = "" if cert.witness_n is None else cert.witness_n
        print(f"{D:>3} {cert.fano_index:>3}  {cert.theorem:<12} {n}")


if __name__ == "__main__":
    main()
