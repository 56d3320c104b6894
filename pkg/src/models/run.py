from datetime import datetime

from flask_sqlalchemy import SQLAlchemy

db = SQLAlchemy()


class ExperimentRun(db.Model):
    __tablename__ = 'experiment_runs'

    id = db.Column(db.Integer, primary_key=True)
    digest = db.Column(db.String(64), nullable=False, index=True)
    scenario = db.Column(db.String(64), nullable=False)
    passed = db.Column(db.Boolean, nullable=False)
    run_dir = db.Column(db.String(512), nullable=False)
    summary = db.Column(db.JSON, nullable=False)
    created_at = db.Column(db.DateTime, default=datetime.utcnow)

    def to_dict(self):
        return {
            'id': self.id,
            'digest': self.digest,
            'scenario': self.scenario,
            'passed': self.passed,
            'run_dir': self.run_dir,
            'summary': self.summary,
            'created_at': self.created_at.isoformat() if self.created_at else None,
        }
