"""TrotterQPE - Results browser."""

from pathlib import Path

import pandas as pd
import streamlit as st

from services.report_writer import read_report, read_settings
from utils.debug import log_debug, read_recent_logs

REPORT_KINDS = ("spectrum", "distribution", "peak", "ratio", "bench")


def list_reports(output_dir: str | Path) -> pd.DataFrame:
    """One row per CSV report in *output_dir*: kind, file name and settings header."""
    output_dir = Path(output_dir)
    rows = []
    for path in sorted(output_dir.glob("*.csv")):
        kind = path.stem.split("_", 1)[0]
        if kind not in REPORT_KINDS:
            continue
        settings = read_settings(path)
        rows.append({
            "kind": kind,
            "file": path.name,
            "system": settings.get("system", ""),
            "ordering": settings.get("ordering", ""),
            "trotter_order": settings.get("trotter_order", ""),
            "M": settings.get("M", ""),
            "n_ancilla": settings.get("n_ancilla", ""),
        })
    log_debug("Reports listed", output_dir=str(output_dir), count=len(rows))
    return pd.DataFrame(rows, columns=["kind", "file", "system", "ordering", "trotter_order", "M", "n_ancilla"])


def summarize_peaks(output_dir: str | Path) -> pd.DataFrame:
    """Fitted peak of every QPE run, joined with its grid settings."""
    reports = list_reports(output_dir)
    peaks = reports[reports["kind"] == "peak"]
    frames = []
    for _, row in peaks.iterrows():
        fit = read_report(Path(output_dir) / row["file"])
        for key in ("M", "trotter_order", "ordering", "system"):
            fit.insert(0, key, row[key])
        frames.append(fit)
    if not frames:
        return pd.DataFrame()
    return pd.concat(frames, ignore_index=True)


def main() -> None:
    st.set_page_config(
        page_title="TrotterQPE",
        page_icon="⚛",
        layout="wide",
    )

    st.title("TrotterQPE")
    st.caption("Resultados de QPE com Trotter: distribuicoes de fase, picos e razoes de consistencia de tamanho.")

    output_dir = st.sidebar.text_input("Diretorio de resultados", value="results")
    if not Path(output_dir).is_dir():
        st.warning(f"Diretorio {output_dir} nao encontrado. Rode `python run_experiments.py qpe` primeiro.")
        st.stop()

    reports = list_reports(output_dir)
    col1, col2, col3 = st.columns(3)
    col1.metric("Arquivos", len(reports))
    col2.metric("Execucoes QPE", int((reports["kind"] == "distribution").sum()))
    col3.metric("Tabelas de razao", int((reports["kind"] == "ratio").sum()))

    st.divider()

    st.markdown("### Picos ajustados")
    st.dataframe(summarize_peaks(output_dir), use_container_width=True)

    st.markdown("### Razoes dimero/monomero")
    for name in reports.loc[reports["kind"] == "ratio", "file"]:
        st.markdown(f"**{name}**")
        st.dataframe(read_report(Path(output_dir) / name, dtype={"M": str}), use_container_width=True)

    st.markdown("### Arquivo")
    selected = st.selectbox("Relatorio", reports["file"].tolist())
    if selected:
        path = Path(output_dir) / selected
        st.code(";\n".join(f"{k}={v}" for k, v in read_settings(path).items()), language="text")
        st.dataframe(read_report(path), use_container_width=True)

    with st.expander("Logs recentes"):
        st.code("".join(read_recent_logs(50)), language="text")


if __name__ == "__main__":
    main()
