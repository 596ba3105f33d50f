import json

from bmx.models import VerificationReport


class ReportLog:
    def __init__(self) -> None:
        self.reports: list[VerificationReport] = []

    def add_report(self, report: VerificationReport) -> None:
        self.reports.append(report)

    def load(self) -> list[VerificationReport]:
        return self.reports

    def clear(self) -> None:
        self.reports = []

    @property
    def passed(self) -> bool:
        return all(report.passed for report in self.reports)

    def dump(self) -> str:
        """One report as an object, several as ``{"reports": [...]}``."""
        payload = [report.model_dump(mode="json") for report in self.reports]
        if len(payload) == 1:
            return json.dumps(payload[0], indent=2) + "\n"
        return json.dumps({"reports": payload}, indent=2) + "\n"

    def __len__(self) -> int:
        return len(self.reports)

    def __iter__(self):
        return iter(self.reports)
