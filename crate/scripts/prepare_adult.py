#!/usr/bin/env python3
"""Build the desk-scale Adult-census fixture used by the tests and README.

Reads the original UCI `adult.data` file, drops rows with missing values,
groups a few categorical columns into coarser levels, keeps seven features
and writes every `--stride`-th row to CSV.

    python3 scripts/prepare_adult.py /path/to/adult.data fixtures/adult_subset.csv
"""
import argparse
import csv

MARITAL = {
    "Married-civ-spouse": "Married",
    "Married-AF-spouse": "Married",
    "Married-spouse-absent": "Married",
    "Never-married": "Never Married",
    "Divorced": "Divorced/Widowed",
    "Widowed": "Divorced/Widowed",
    "Separated": "Divorced/Widowed",
}

EDUCATION = {
    "Bachelors": "Bachelors",
    "Masters": "Masters or Doctorate",
    "Doctorate": "Masters or Doctorate",
    "Prof-school": "Professional or Associate Degree",
    "Assoc-acdm": "Professional or Associate Degree",
    "Assoc-voc": "Professional or Associate Degree",
    "Some-college": "Some College",
    "HS-grad": "High School Graduate",
}

OCCUPATION = {
    "Other-service": "Service",
    "Protective-serv": "Service",
    "Priv-house-serv": "Service",
    "Armed-Forces": "Service",
    "Prof-specialty": "Professional",
    "Exec-managerial": "Professional",
    "Sales": "Sales",
    "Adm-clerical": "Clerical",
    "Tech-support": "Clerical",
    "Craft-repair": "Blue Collar",
    "Machine-op-inspct": "Blue Collar",
    "Handlers-cleaners": "Blue Collar",
    "Transport-moving": "Blue Collar",
    "Farming-fishing": "Blue Collar",
}

HEADER = [
    "Marital Status",
    "Years of Education",
    "Occupation",
    "Age",
    "Any capital gains",
    "Working hours per week",
    "Education",
    "income",
]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("source")
    ap.add_argument("dest")
    ap.add_argument("--stride", type=int, default=6)
    args = ap.parse_args()

    rows = []
    with open(args.source, newline="") as f:
        for rec in csv.reader(f, skipinitialspace=True):
            if len(rec) != 15 or "?" in rec:
                continue
            age, _, _, edu, edu_num, marital, occ = rec[:7]
            gain, hours, label = rec[10], rec[12], rec[14]
            rows.append(
                [
                    MARITAL[marital],
                    edu_num,
                    OCCUPATION[occ],
                    age,
                    "Yes" if int(gain) > 0 else "No",
                    hours,
                    EDUCATION.get(edu, "Less than High School"),
                    label,
                ]
            )

    with open(args.dest, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(HEADER)
        w.writerows(rows[:: args.stride])


if __name__ == "__main__":
    main()
