import pytest

from health_monitor import MAX_ALERTS, ResourceMonitor


@pytest.fixture
def monitor():
    return ResourceMonitor()


def test_small_jobs_are_not_inspected(monitor):
    assert monitor.check_enumeration(10)
    assert monitor.jobs_checked == 1
    assert monitor.alerts == []


def test_large_job_under_pressure_raises_alert():
    monitor = ResourceMonitor({'large_job_size': 1, 'system_memory_max': -1.0})
    assert not monitor.check_enumeration(100, 'test enumeration')
    assert len(monitor.alerts) == 1
    assert 'test enumeration' in monitor.alerts[0]['message']
    assert monitor.alerts[0]['level'] == 'warning'
    assert monitor.get_health_status()['overall_health'] == 'warning'


def test_large_job_with_headroom(monkeypatch):
    monitor = ResourceMonitor({'large_job_size': 1})
    monkeypatch.setattr(monitor, 'get_system_metrics',
                        lambda: {'cpu_percent': 10.0, 'memory_percent': 20.0,
                                 'process_rss_mb': 50.0, 'load_average': [0, 0, 0]})
    assert monitor.check_enumeration(100)
    assert monitor.get_health_status()['overall_health'] == 'good'


def test_alert_history_is_bounded():
    monitor = ResourceMonitor({'large_job_size': 1, 'system_memory_max': -1.0})
    for _ in range(MAX_ALERTS + 5):
        monitor.check_enumeration(2)
    assert len(monitor.alerts) == MAX_ALERTS
    assert len(monitor.get_health_status()['recent_alerts']) == 10


def test_system_metrics(monitor):
    metrics = monitor.get_system_metrics()
    assert set(metrics) == {'cpu_percent', 'memory_percent', 'process_rss_mb', 'load_average'}
    assert metrics['process_rss_mb'] > 0
    assert len(metrics['load_average']) == 3
