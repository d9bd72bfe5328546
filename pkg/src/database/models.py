"""SQLAlchemy models of the experiment results store."""

from sqlalchemy import (
    Boolean,
    Column,
    DateTime,
    Float,
    ForeignKey,
    Index,
    Integer,
    String,
    UniqueConstraint,
)
from sqlalchemy.orm import declarative_base, relationship
from sqlalchemy.sql import func

Base = declarative_base()


class ExperimentRun(Base):
    """One evaluated (config, seed) pair."""

    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True)
    experiment = Column(String(100), nullable=False)
    env = Column(String(50), nullable=False)
    r = Column(Float, nullable=False)
    config_hash = Column(String(12), nullable=False, index=True)
    seed = Column(Integer, nullable=False)
    phase = Column(String(10), nullable=False, default="test")
    created_at = Column(DateTime, default=func.now())

    __table_args__ = (
        UniqueConstraint("config_hash", "seed", "phase", name="uq_run_config_seed_phase"),
    )

    # Relationships
    episodes = relationship("EpisodeResult", back_populates="run", cascade="all, delete-orphan")


class EpisodeResult(Base):
    """Outcome of one object's sub-dialogue in one episode."""

    __tablename__ = "episode_results"

    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey("experiment_runs.id", ondelete="CASCADE"), nullable=False)
    episode = Column(Integer, nullable=False)
    object_id = Column(String(100), nullable=False)
    object_position = Column(Integer, nullable=False)
    policy = Column(String(50), nullable=False)
    success = Column(Boolean, nullable=False)
    turns = Column(Integer, nullable=False)
    reward = Column(Float, nullable=False)
    relation_act = Column(Boolean, nullable=False, default=False)

    __table_args__ = (
        Index("idx_episode_results_run_object", "run_id", "object_position", "object_id"),
    )

    # Relationships
    run = relationship("ExperimentRun", back_populates="episodes")
