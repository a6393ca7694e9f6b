//! Handler-level tests for the AODV agent, one cluster per operation.

use aodvsim_core::agent::{
    AodvAgent, AodvConfig, DropReason, Effect, TimerKind, TxDest,
};
use aodvsim_core::packet::{Addr, AodvHeader, NodeId, Packet};
use aodvsim_core::rng::RandomSource;
use aodvsim_core::tables::RouteFlag;
use aodvsim_core::time::Time;

fn t(s: f64) -> Time {
    Time::from_secs(s)
}

fn agent(id: u16) -> AodvAgent {
    AodvAgent::new(NodeId(id), AodvConfig::default(), true)
}

fn rng() -> RandomSource {
    RandomSource::new(0)
}

fn rreq(src: u16, bid: u32, dst: u16, dst_seqno: u32, src_seqno: u32, hop: u32, ttl: u32) -> Packet {
    Packet::aodv(
        900,
        NodeId(src),
        Addr::Broadcast,
        ttl,
        AodvHeader::Request {
            hop_count: hop,
            bcast_id: bid,
            dst: NodeId(dst),
            dst_seqno,
            src: NodeId(src),
            src_seqno,
            timestamp: 0.0,
        },
    )
}

fn rrep(from: u16, ipdst: u16, rpdst: u16, rpseq: u32, hop: u32, lifetime: f64) -> Packet {
    Packet::aodv(
        901,
        NodeId(from),
        Addr::Node(NodeId(ipdst)),
        30,
        AodvHeader::Reply {
            hop_count: hop,
            rpdst: NodeId(rpdst),
            rpseq,
            lifetime,
            timestamp: 0.0,
        },
    )
}

fn rerr(from: u16, dests: Vec<(u16, u32)>) -> Packet {
    Packet::aodv(
        902,
        NodeId(from),
        Addr::Broadcast,
        1,
        AodvHeader::Error {
            dests: dests.into_iter().map(|(d, s)| (NodeId(d), s)).collect(),
        },
    )
}

fn hello(from: u16, rpseq: u32) -> Packet {
    Packet::aodv(
        903,
        NodeId(from),
        Addr::Broadcast,
        1,
        AodvHeader::Hello {
            hop_count: 1,
            rpdst: NodeId(from),
            rpseq,
            lifetime: 4.0,
        },
    )
}

fn data(uid: u64, src: u16, dst: u16, ttl: u32) -> Packet {
    Packet::data(uid, NodeId(src), NodeId(dst), ttl, 0, 512)
}

fn transmits(effects: &[Effect]) -> Vec<(&Packet, TxDest, f64)> {
    effects
        .iter()
        .filter_map(|e| match e {
            Effect::Transmit { pkt, dest, delay } => Some((pkt, *dest, *delay)),
            _ => None,
        })
        .collect()
}

fn drops(effects: &[Effect]) -> Vec<(&Packet, DropReason)> {
    effects
        .iter()
        .filter_map(|e| match e {
            Effect::Drop { pkt, reason } => Some((pkt, *reason)),
            _ => None,
        })
        .collect()
}

fn timers(effects: &[Effect]) -> Vec<(TimerKind, f64)> {
    effects
        .iter()
        .filter_map(|e| match e {
            Effect::ArmTimer { kind, delay } => Some((*kind, *delay)),
            _ => None,
        })
        .collect()
}

mod start {
    use super::*;

    #[test]
    fn arms_three_timers_without_hello() {
        let mut a = agent(0);
        a.start().unwrap();
        let effects = a.take_effects();
        let kinds: Vec<TimerKind> = timers(&effects).iter().map(|(k, _)| *k).collect();
        assert_eq!(
            kinds,
            [TimerKind::Broadcast, TimerKind::Neighbor, TimerKind::RouteCache]
        );
        assert!(timers(&effects).iter().all(|(_, d)| *d == 0.0));
    }

    #[test]
    fn arms_hello_timer_when_enabled() {
        let mut a = AodvAgent::new(
            NodeId(0),
            AodvConfig {
                hello_enabled: true,
                ..AodvConfig::default()
            },
            true,
        );
        a.start().unwrap();
        let kinds: Vec<TimerKind> = timers(&a.take_effects()).iter().map(|(k, _)| *k).collect();
        assert!(kinds.contains(&TimerKind::Hello));
    }

    #[test]
    fn double_start_is_rejected() {
        let mut a = agent(0);
        a.start().unwrap();
        assert!(a.start().is_err());
    }
}

mod recv {
    use super::*;

    #[test]
    fn aodv_packets_lose_one_ttl_before_dispatch() {
        let mut a = agent(1);
        a.recv(rreq(0, 1, 2, 0, 4, 0, 30), Some(NodeId(0)), t(1.0), &mut rng());
        let effects = a.take_effects();
        let (pkt, dest, _) = transmits(&effects)[0];
        // not the destination and no cached route: flooded on
        assert_eq!(dest, TxDest::Broadcast);
        assert_eq!(pkt.ttl, 29);
        match pkt.aodv_header().unwrap() {
            AodvHeader::Request { hop_count, .. } => assert_eq!(*hop_count, 1),
            h => panic!("unexpected header {:?}", h),
        }
        // rebroadcasts are re-sourced by the forwarder
        assert_eq!(pkt.src, NodeId(1));
    }

    #[test]
    fn own_data_without_route_buffers_and_requests() {
        let mut a = agent(0);
        a.recv(data(7, 0, 2, 0), None, t(1.0), &mut rng());
        let effects = a.take_effects();
        assert_eq!(a.tables().rqueue.len(NodeId(2)), 1);
        let tx = transmits(&effects);
        assert_eq!(tx.len(), 1);
        let (pkt, dest, _) = tx[0];
        assert_eq!(dest, TxDest::Broadcast);
        assert_eq!(pkt.ttl, 30);
        match pkt.aodv_header().unwrap() {
            AodvHeader::Request {
                bcast_id,
                dst,
                dst_seqno,
                src_seqno,
                hop_count,
                ..
            } => {
                assert_eq!(*bcast_id, 1);
                assert_eq!(*dst, NodeId(2));
                assert_eq!(*dst_seqno, 0);
                assert_eq!(*src_seqno, 4); // 2 + 2
                assert_eq!(*hop_count, 0); // wire value
            }
            h => panic!("unexpected header {:?}", h),
        }
        assert_eq!(timers(&effects), [(TimerKind::LocalRepair(NodeId(2)), 0.12)]);
    }

    #[test]
    fn own_forwarded_data_coming_back_is_a_loop() {
        let mut a = agent(0);
        let mut pkt = data(8, 0, 2, 28);
        pkt.num_forwards = 2;
        a.recv(pkt, Some(NodeId(1)), t(1.0), &mut rng());
        let effects = a.take_effects();
        assert_eq!(drops(&effects)[0].1, DropReason::RouteLoop);
        assert!(transmits(&effects).is_empty());
    }

    #[test]
    fn relayed_data_with_spent_ttl_is_dropped() {
        let mut a = agent(1);
        a.recv(data(9, 0, 2, 1), Some(NodeId(0)), t(1.0), &mut rng());
        let effects = a.take_effects();
        assert_eq!(drops(&effects)[0].1, DropReason::TtlZero);
    }
}

mod recv_aodv {
    use super::*;

    #[test]
    fn hello_reaches_the_neighbor_handler() {
        let mut a = agent(1);
        a.recv(hello(0, 2), Some(NodeId(0)), t(21.5), &mut rng());
        assert!(a.neighbor(NodeId(0)).is_some());
    }

    #[test]
    fn unknown_type_code_is_dropped_and_traced() {
        let mut a = agent(1);
        let pkt = Packet::aodv(1, NodeId(0), Addr::Broadcast, 5, AodvHeader::Unknown { code: 0x9 });
        a.recv(pkt, Some(NodeId(0)), t(1.0), &mut rng());
        let effects = a.take_effects();
        assert_eq!(drops(&effects)[0].1, DropReason::UnknownType);
    }
}

mod recv_request {
    use super::*;

    #[test]
    fn duplicate_flood_is_ignored() {
        let mut a = agent(1);
        a.recv(rreq(0, 1, 5, 0, 4, 0, 30), Some(NodeId(0)), t(1.0), &mut rng());
        assert_eq!(transmits(&a.take_effects()).len(), 1);
        // the same flood arrives again over another path
        a.recv(rreq(0, 1, 5, 0, 4, 1, 29), Some(NodeId(2)), t(1.1), &mut rng());
        assert!(a.take_effects().is_empty());
    }

    #[test]
    fn reverse_route_installs_toward_the_originator() {
        let mut a = agent(1);
        a.recv(rreq(0, 1, 5, 0, 4, 0, 30), Some(NodeId(0)), t(1.0), &mut rng());
        let e = a.route(NodeId(0)).unwrap();
        assert_eq!(e.flag, RouteFlag::Up);
        assert_eq!(e.hops, 1); // wire hop 0 + 1
        assert_eq!(e.nexthop, Some(NodeId(0)));
        assert_eq!(e.seqno, 4);
    }

    #[test]
    fn destination_replies_with_hop_one_and_its_own_seqno() {
        let mut a = agent(2);
        a.recv(rreq(0, 1, 2, 0, 4, 0, 30), Some(NodeId(0)), t(1.0), &mut rng());
        let effects = a.take_effects();
        let tx = transmits(&effects);
        assert_eq!(tx.len(), 1);
        let (pkt, dest, _) = tx[0];
        assert_eq!(dest, TxDest::Unicast(NodeId(0)));
        assert_eq!(pkt.dst, Addr::Node(NodeId(0)));
        match pkt.aodv_header().unwrap() {
            AodvHeader::Reply {
                hop_count,
                rpdst,
                rpseq,
                lifetime,
                ..
            } => {
                assert_eq!(*hop_count, 1);
                assert_eq!(*rpdst, NodeId(2));
                assert_eq!(*rpseq, 4);
                assert_eq!(*lifetime, 10.0);
            }
            h => panic!("unexpected header {:?}", h),
        }
        assert_eq!(a.seqno(), 4);
    }

    #[test]
    fn destination_seqno_advances_past_the_requested_one_and_stays_even() {
        let mut a = agent(2);
        a.recv(rreq(0, 1, 2, 5, 4, 0, 30), Some(NodeId(0)), t(1.0), &mut rng());
        a.take_effects();
        assert_eq!(a.seqno(), 6); // max(2, 5) + 1 = 6, already even

        let mut b = agent(2);
        b.recv(rreq(0, 1, 2, 6, 4, 0, 30), Some(NodeId(0)), t(1.0), &mut rng());
        b.take_effects();
        assert_eq!(b.seqno(), 8); // max(2, 6) + 1 = 7, rounded up
    }

    #[test]
    fn intermediate_with_fresh_route_replies_with_stored_hops_plus_one() {
        let mut a = agent(1);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 1, Some(NodeId(2)), t(100.0));
        a.recv(rreq(0, 1, 2, 4, 4, 0, 30), Some(NodeId(0)), t(1.0), &mut rng());
        let effects = a.take_effects();
        let tx = transmits(&effects);
        assert_eq!(tx.len(), 1);
        match tx[0].0.aodv_header().unwrap() {
            AodvHeader::Reply {
                hop_count,
                rpdst,
                rpseq,
                lifetime,
                ..
            } => {
                assert_eq!(*hop_count, 2);
                assert_eq!(*rpdst, NodeId(2));
                assert_eq!(*rpseq, 4);
                assert_eq!(*lifetime, 99.0);
            }
            h => panic!("unexpected header {:?}", h),
        }
    }

    #[test]
    fn intermediate_with_stale_route_floods_on() {
        let mut a = agent(1);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 1, Some(NodeId(2)), t(100.0));
        a.recv(rreq(0, 1, 2, 6, 4, 0, 30), Some(NodeId(0)), t(1.0), &mut rng());
        let effects = a.take_effects();
        let (pkt, dest, _) = transmits(&effects)[0];
        assert_eq!(dest, TxDest::Broadcast);
        assert!(matches!(pkt.aodv_header(), Some(AodvHeader::Request { .. })));
    }

    #[test]
    fn exhausted_hop_budget_ends_the_flood_quietly() {
        let mut a = agent(1);
        a.recv(rreq(0, 1, 5, 0, 4, 29, 1), Some(NodeId(0)), t(1.0), &mut rng());
        let effects = a.take_effects();
        assert!(transmits(&effects).is_empty());
        assert!(drops(&effects).is_empty());
    }
}

mod recv_reply {
    use super::*;

    #[test]
    fn installs_fresh_forward_route() {
        let mut a = agent(1);
        a.recv(rrep(2, 1, 2, 4, 1, 10.0), Some(NodeId(2)), t(1.0), &mut rng());
        let e = a.route(NodeId(2)).unwrap();
        assert_eq!(e.flag, RouteFlag::Up);
        assert_eq!(e.nexthop, Some(NodeId(2)));
        assert_eq!(e.hops, 1);
        assert_eq!(e.seqno, 4);
        assert_eq!(e.expire, t(11.0));
    }

    #[test]
    fn stale_reply_changes_nothing() {
        let mut a = agent(1);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 2, Some(NodeId(3)), t(50.0));
        a.recv(rrep(2, 1, 2, 2, 1, 10.0), Some(NodeId(2)), t(1.0), &mut rng());
        let e = a.route(NodeId(2)).unwrap();
        assert_eq!(e.seqno, 4);
        assert_eq!(e.nexthop, Some(NodeId(3)));
    }

    #[test]
    fn equal_seqno_with_worse_metric_changes_nothing() {
        let mut a = agent(1);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 2, Some(NodeId(3)), t(50.0));
        a.recv(rrep(2, 1, 2, 4, 3, 10.0), Some(NodeId(2)), t(1.0), &mut rng());
        assert_eq!(a.route(NodeId(2)).unwrap().hops, 2);
    }

    #[test]
    fn relays_toward_the_requester_with_one_more_hop() {
        let mut a = agent(1);
        a.tables_mut()
            .rtable
            .add(NodeId(0), 3)
            .update(4, 1, Some(NodeId(0)), t(50.0));
        a.recv(rrep(2, 0, 2, 4, 1, 10.0), Some(NodeId(2)), t(1.0), &mut rng());
        let effects = a.take_effects();
        let (pkt, dest, _) = transmits(&effects)[0];
        assert_eq!(dest, TxDest::Unicast(NodeId(0)));
        match pkt.aodv_header().unwrap() {
            AodvHeader::Reply { hop_count, .. } => assert_eq!(*hop_count, 2),
            h => panic!("unexpected header {:?}", h),
        }
    }

    #[test]
    fn missing_reverse_route_drops_the_relay() {
        let mut a = agent(1);
        a.recv(rrep(2, 0, 2, 4, 1, 10.0), Some(NodeId(2)), t(1.0), &mut rng());
        let effects = a.take_effects();
        assert_eq!(drops(&effects)[0].1, DropReason::NoRoute);
    }

    #[test]
    fn repair_returns_to_up_and_flushes_the_buffer() {
        let mut a = agent(1);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 2, Some(NodeId(3)), t(50.0));
        a.tables_mut().rtable.get_mut(NodeId(2)).unwrap().mark_repair();
        a.tables_mut().rqueue.enque(NodeId(2), data(11, 1, 2, 30), t(1.0));
        a.recv(rrep(4, 1, 2, 6, 1, 10.0), Some(NodeId(4)), t(2.0), &mut rng());
        assert_eq!(a.route(NodeId(2)).unwrap().flag, RouteFlag::Up);
        let effects = a.take_effects();
        let tx = transmits(&effects);
        assert_eq!(tx.len(), 1);
        assert!(tx[0].0.is_data());
        assert_eq!(tx[0].1, TxDest::Unicast(NodeId(4)));
    }
}

mod recv_error {
    use super::*;

    #[test]
    fn downs_matching_route_and_adopts_the_listed_seqno() {
        let mut a = agent(0);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 2, Some(NodeId(1)), t(50.0));
        a.recv(rerr(1, vec![(2, 6)]), Some(NodeId(1)), t(1.0), &mut rng());
        let e = a.route(NodeId(2)).unwrap();
        assert_eq!(e.flag, RouteFlag::Down);
        assert_eq!(e.seqno, 6);
        // the downed route is re-advertised upstream
        let effects = a.take_effects();
        let (pkt, dest, delay) = transmits(&effects)[0];
        assert_eq!(dest, TxDest::Broadcast);
        assert!(delay > 0.0 && delay <= 0.01);
        match pkt.aodv_header().unwrap() {
            AodvHeader::Error { dests } => assert_eq!(dests.as_slice(), &[(NodeId(2), 6)]),
            h => panic!("unexpected header {:?}", h),
        }
    }

    #[test]
    fn unknown_destination_is_ignored() {
        let mut a = agent(0);
        a.recv(rerr(1, vec![(9, 6)]), Some(NodeId(1)), t(1.0), &mut rng());
        assert!(a.take_effects().is_empty());
    }

    #[test]
    fn error_from_a_non_nexthop_is_ignored() {
        let mut a = agent(0);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 2, Some(NodeId(1)), t(50.0));
        a.recv(rerr(3, vec![(2, 6)]), Some(NodeId(3)), t(1.0), &mut rng());
        assert_eq!(a.route(NodeId(2)).unwrap().flag, RouteFlag::Up);
        assert!(a.take_effects().is_empty());
    }

    #[test]
    fn fresher_local_seqno_wins_over_the_error() {
        let mut a = agent(0);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(8, 2, Some(NodeId(1)), t(50.0));
        a.recv(rerr(1, vec![(2, 6)]), Some(NodeId(1)), t(1.0), &mut rng());
        assert_eq!(a.route(NodeId(2)).unwrap().flag, RouteFlag::Up);
    }
}

mod recv_hello {
    use super::*;

    #[test]
    fn unknown_sender_becomes_a_neighbor_with_the_formula_expiry() {
        let mut a = agent(1);
        a.recv(hello(0, 2), Some(NodeId(0)), t(21.5), &mut rng());
        let nb = a.neighbor(NodeId(0)).unwrap();
        assert_eq!(nb.expire, t(26.0));
    }

    #[test]
    fn known_sender_is_refreshed_in_place() {
        let mut a = agent(1);
        a.recv(hello(0, 2), Some(NodeId(0)), t(1.0), &mut rng());
        a.recv(hello(0, 2), Some(NodeId(0)), t(2.0), &mut rng());
        assert_eq!(a.tables().neighbors.len(), 1);
        assert_eq!(a.neighbor(NodeId(0)).unwrap().expire, t(6.5));
    }

    #[test]
    fn hellos_are_never_relayed() {
        let mut a = agent(1);
        a.recv(hello(0, 2), Some(NodeId(0)), t(1.0), &mut rng());
        assert!(transmits(&a.take_effects()).is_empty());
    }
}

mod send_hello {
    use super::*;

    #[test]
    fn beacon_carries_ttl_one_and_the_advertised_lifetime() {
        let mut a = agent(0);
        a.send_hello(t(0.0));
        let effects = a.take_effects();
        let (pkt, dest, _) = transmits(&effects)[0];
        assert_eq!(dest, TxDest::Broadcast);
        assert_eq!(pkt.ttl, 1);
        match pkt.aodv_header().unwrap() {
            AodvHeader::Hello {
                hop_count,
                rpdst,
                rpseq,
                lifetime,
            } => {
                assert_eq!(*hop_count, 1);
                assert_eq!(*rpdst, NodeId(0));
                assert_eq!(*rpseq, 2);
                assert_eq!(*lifetime, 4.0); // (1 + 3) * 1.0
            }
            h => panic!("unexpected header {:?}", h),
        }
    }
}

mod send_request {
    use super::*;

    #[test]
    fn noop_when_a_route_is_up() {
        let mut a = agent(0);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 2, Some(NodeId(1)), t(50.0));
        a.send_request(NodeId(2), t(1.0));
        assert!(a.take_effects().is_empty());
    }

    #[test]
    fn retries_back_off_exponentially_then_shed_the_queue() {
        let mut a = agent(0);
        let mut r = rng();
        a.recv(data(7, 0, 2, 0), None, t(1.0), &mut r);
        let mut all_bids = Vec::new();
        let mut all_waits = Vec::new();
        let mut now = 1.0;
        // the initial send plus two retries, then the final deadline
        for _ in 0..3 {
            let effects = a.take_effects();
            for (pkt, _, _) in transmits(&effects) {
                if let Some(AodvHeader::Request { bcast_id, src_seqno, .. }) = pkt.aodv_header() {
                    all_bids.push(*bcast_id);
                    assert_eq!(*src_seqno, a.seqno());
                }
            }
            for (_, wait) in timers(&effects) {
                all_waits.push(wait);
                now += wait;
            }
            assert!(drops(&effects).is_empty());
            a.handle_timer(TimerKind::LocalRepair(NodeId(2)), t(now), &mut r);
        }
        assert_eq!(all_bids, [1, 2, 3]);
        assert_eq!(all_waits, [0.12, 0.24, 0.48]);
        // retry budget exhausted: the buffered packet is shed
        let final_effects = a.take_effects();
        assert!(transmits(&final_effects).is_empty());
        let shed = drops(&final_effects);
        assert_eq!(shed.len(), 1);
        assert_eq!(shed[0].1, DropReason::NoRoute);
        assert_eq!(a.tables().rqueue.len(NodeId(2)), 0);
    }

    #[test]
    fn while_a_request_is_pending_nothing_new_is_sent() {
        let mut a = agent(0);
        a.send_request(NodeId(2), t(1.0));
        assert_eq!(transmits(&a.take_effects()).len(), 1);
        a.send_request(NodeId(2), t(1.1));
        assert!(a.take_effects().is_empty());
    }
}

mod send_reply {
    use super::*;

    #[test]
    fn purged_reverse_route_means_a_traced_drop() {
        let mut a = agent(2);
        a.send_reply(NodeId(0), 1, NodeId(2), 2, 10.0, 0.0, t(1.0));
        let effects = a.take_effects();
        assert_eq!(drops(&effects)[0].1, DropReason::NoRoute);
    }
}

mod send_error {
    use super::*;

    #[test]
    fn without_jitter_it_leaves_immediately() {
        let mut a = agent(1);
        a.send_error(vec![(NodeId(2), 5)], false, t(1.0), &mut rng());
        let effects = a.take_effects();
        let (pkt, dest, delay) = transmits(&effects)[0];
        assert_eq!(delay, 0.0);
        assert_eq!(dest, TxDest::Broadcast);
        assert_eq!(pkt.ttl, 1);
    }

    #[test]
    fn jitter_delays_into_the_ten_millisecond_window() {
        for seed in 0..100 {
            let mut a = agent(1);
            let mut r = RandomSource::new(seed);
            a.send_error(vec![(NodeId(2), 5)], true, t(1.0), &mut r);
            let effects = a.take_effects();
            let (_, _, delay) = transmits(&effects)[0];
            assert!(delay > 0.0 && delay <= 0.01, "delay {} out of window", delay);
        }
    }

    #[test]
    fn one_packet_lists_every_destination() {
        let mut a = agent(1);
        a.send_error(vec![(NodeId(2), 5), (NodeId(3), 9)], false, t(1.0), &mut rng());
        let effects = a.take_effects();
        match transmits(&effects)[0].0.aodv_header().unwrap() {
            AodvHeader::Error { dests } => assert_eq!(dests.len(), 2),
            h => panic!("unexpected header {:?}", h),
        }
    }
}

mod forward {
    use super::*;

    #[test]
    fn unicast_refreshes_the_route_expiry() {
        let mut a = agent(1);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 1, Some(NodeId(2)), t(3.0));
        a.forward(Some(NodeId(2)), data(7, 0, 2, 29), 0.0, t(5.0));
        assert_eq!(a.route(NodeId(2)).unwrap().expire, t(15.0));
        let effects = a.take_effects();
        let (pkt, dest, _) = transmits(&effects)[0];
        assert_eq!(dest, TxDest::Unicast(NodeId(2)));
        assert_eq!(pkt.nexthop, Some(NodeId(2)));
        assert_eq!(pkt.num_forwards, 1); // relayed once by this node
    }

    #[test]
    fn spent_ttl_is_dropped_with_the_ttl_reason() {
        let mut a = agent(1);
        a.forward(Some(NodeId(2)), data(7, 0, 2, 0), 0.0, t(5.0));
        let effects = a.take_effects();
        assert_eq!(drops(&effects)[0].1, DropReason::TtlZero);
    }

    #[test]
    fn no_route_broadcasts_are_allowed() {
        let mut a = agent(1);
        let mut pkt = rreq(1, 1, 5, 0, 4, 1, 29);
        pkt.nexthop = Some(NodeId(9)); // stale; must be cleared
        a.forward(None, pkt, 0.0, t(5.0));
        let effects = a.take_effects();
        let (pkt, dest, _) = transmits(&effects)[0];
        assert_eq!(dest, TxDest::Broadcast);
        assert_eq!(pkt.nexthop, None);
    }
}

mod rt_resolve {
    use super::*;

    #[test]
    fn up_route_forwards_and_refreshes() {
        let mut a = agent(1);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 1, Some(NodeId(2)), t(3.0));
        a.rt_resolve(data(7, 0, 2, 29), t(2.0), &mut rng());
        assert_eq!(a.route(NodeId(2)).unwrap().expire, t(12.0));
        assert_eq!(transmits(&a.take_effects()).len(), 1);
    }

    #[test]
    fn source_with_down_route_buffers_and_requests() {
        let mut a = agent(0);
        a.rt_resolve(data(7, 0, 2, 30), t(2.0), &mut rng());
        assert_eq!(a.tables().rqueue.len(NodeId(2)), 1);
        let effects = a.take_effects();
        assert!(matches!(
            transmits(&effects)[0].0.aodv_header(),
            Some(AodvHeader::Request { .. })
        ));
    }

    #[test]
    fn relay_without_route_drops_and_reports_upstream() {
        let mut a = agent(1);
        a.rt_resolve(data(7, 0, 5, 29), t(2.0), &mut rng());
        let effects = a.take_effects();
        assert_eq!(drops(&effects)[0].1, DropReason::NoRoute);
        let (pkt, _, delay) = transmits(&effects)[0];
        assert_eq!(delay, 0.0);
        match pkt.aodv_header().unwrap() {
            // last known seqno (0) + 1
            AodvHeader::Error { dests } => assert_eq!(dests.as_slice(), &[(NodeId(5), 1)]),
            h => panic!("unexpected header {:?}", h),
        }
    }

    #[test]
    fn repair_in_progress_only_buffers() {
        let mut a = agent(1);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 1, Some(NodeId(2)), t(50.0));
        a.tables_mut().rtable.get_mut(NodeId(2)).unwrap().mark_repair();
        a.rt_resolve(data(7, 0, 2, 29), t(2.0), &mut rng());
        assert_eq!(a.tables().rqueue.len(NodeId(2)), 1);
        assert!(a.take_effects().is_empty());
    }
}

mod local_rt_repair {
    use super::*;

    #[test]
    fn marks_repair_buffers_and_floods_once() {
        let mut a = agent(2);
        a.tables_mut()
            .rtable
            .add(NodeId(3), 3)
            .update(4, 1, Some(NodeId(3)), t(50.0));
        a.local_rt_repair(NodeId(3), data(7, 0, 3, 28), t(2.0));
        assert_eq!(a.route(NodeId(3)).unwrap().flag, RouteFlag::Repair);
        assert_eq!(a.tables().rqueue.len(NodeId(3)), 1);
        assert_eq!(transmits(&a.take_effects()).len(), 1);
        // a second failure while repairing buffers without a new flood
        a.local_rt_repair(NodeId(3), data(8, 0, 3, 28), t(2.1));
        assert_eq!(a.tables().rqueue.len(NodeId(3)), 2);
        assert!(transmits(&a.take_effects()).is_empty());
    }

    #[test]
    fn repair_timeout_downs_the_route_and_reports_upstream() {
        let mut a = AodvAgent::new(
            NodeId(2),
            AodvConfig {
                rreq_retries: 1,
                ..AodvConfig::default()
            },
            true,
        );
        let mut r = rng();
        a.tables_mut()
            .rtable
            .add(NodeId(3), 1)
            .update(4, 1, Some(NodeId(3)), t(50.0));
        a.local_rt_repair(NodeId(3), data(7, 0, 3, 28), t(2.0));
        a.take_effects();
        a.handle_timer(TimerKind::LocalRepair(NodeId(3)), t(2.2), &mut r);
        let e = a.route(NodeId(3)).unwrap();
        assert_eq!(e.flag, RouteFlag::Down);
        assert_eq!(e.seqno, 5);
        let effects = a.take_effects();
        match transmits(&effects)[0].0.aodv_header().unwrap() {
            AodvHeader::Error { dests } => assert_eq!(dests.as_slice(), &[(NodeId(3), 5)]),
            h => panic!("unexpected header {:?}", h),
        }
        assert_eq!(drops(&effects)[0].1, DropReason::NoRoute);
    }
}

mod rt_ll_failed {
    use super::*;

    #[test]
    fn detection_off_means_drop_only() {
        let mut a = AodvAgent::new(NodeId(0), AodvConfig::default(), false);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 1, Some(NodeId(1)), t(50.0));
        let mut pkt = data(7, 0, 2, 30);
        pkt.nexthop = Some(NodeId(1));
        a.rt_ll_failed(pkt, t(2.0), &mut rng());
        let effects = a.take_effects();
        assert_eq!(drops(&effects)[0].1, DropReason::Callback);
        assert!(transmits(&effects).is_empty());
        assert_eq!(a.route(NodeId(2)).unwrap().flag, RouteFlag::Up);
    }

    #[test]
    fn broadcast_and_control_failures_drop_silently() {
        let mut a = agent(0);
        a.rt_ll_failed(rreq(0, 1, 2, 0, 4, 0, 30), t(2.0), &mut rng());
        let effects = a.take_effects();
        assert_eq!(drops(&effects)[0].1, DropReason::Callback);
        assert!(transmits(&effects).is_empty());
    }

    #[test]
    fn break_closer_to_the_destination_attempts_repair() {
        let mut a = agent(2);
        a.tables_mut()
            .rtable
            .add(NodeId(3), 3)
            .update(4, 1, Some(NodeId(3)), t(50.0));
        let mut pkt = data(7, 0, 3, 28);
        pkt.nexthop = Some(NodeId(3));
        pkt.num_forwards = 2; // two hops from the source, one to go
        a.rt_ll_failed(pkt, t(2.0), &mut rng());
        assert_eq!(a.route(NodeId(3)).unwrap().flag, RouteFlag::Repair);
    }

    #[test]
    fn break_at_the_first_hop_downs_the_route() {
        let mut a = agent(0);
        a.tables_mut()
            .rtable
            .add(NodeId(3), 3)
            .update(4, 3, Some(NodeId(1)), t(50.0));
        a.tables_mut()
            .rtable
            .add(NodeId(1), 3)
            .update(2, 1, Some(NodeId(1)), t(50.0));
        let mut pkt = data(7, 0, 3, 30);
        pkt.nexthop = Some(NodeId(1));
        a.rt_ll_failed(pkt, t(2.0), &mut rng());
        assert_eq!(a.route(NodeId(3)).unwrap().flag, RouteFlag::Down);
        assert_eq!(a.route(NodeId(1)).unwrap().flag, RouteFlag::Down);
        let effects = a.take_effects();
        assert_eq!(drops(&effects)[0].1, DropReason::Callback);
        // both downed routes are advertised
        match transmits(&effects)[0].0.aodv_header().unwrap() {
            AodvHeader::Error { dests } => assert_eq!(dests.len(), 2),
            h => panic!("unexpected header {:?}", h),
        }
    }
}

mod handle_link_failure {
    use super::*;

    #[test]
    fn two_routes_through_the_hop_make_a_dest_count_two_error() {
        let mut a = agent(0);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 2, Some(NodeId(1)), t(50.0));
        a.tables_mut()
            .rtable
            .add(NodeId(3), 3)
            .update(6, 3, Some(NodeId(1)), t(50.0));
        a.tables_mut()
            .rtable
            .add(NodeId(4), 3)
            .update(8, 1, Some(NodeId(4)), t(50.0));
        a.handle_link_failure(NodeId(1), t(2.0), &mut rng());
        assert_eq!(a.route(NodeId(2)).unwrap().flag, RouteFlag::Down);
        assert_eq!(a.route(NodeId(3)).unwrap().flag, RouteFlag::Down);
        assert_eq!(a.route(NodeId(4)).unwrap().flag, RouteFlag::Up);
        let effects = a.take_effects();
        match transmits(&effects)[0].0.aodv_header().unwrap() {
            AodvHeader::Error { dests } => {
                assert_eq!(dests.as_slice(), &[(NodeId(2), 5), (NodeId(3), 7)]);
            }
            h => panic!("unexpected header {:?}", h),
        }
    }

    #[test]
    fn no_routes_through_the_hop_means_no_error_packet() {
        let mut a = agent(0);
        a.handle_link_failure(NodeId(1), t(2.0), &mut rng());
        assert!(a.take_effects().is_empty());
    }

    #[test]
    fn the_direct_route_to_the_lost_hop_goes_down_too() {
        let mut a = agent(0);
        a.tables_mut()
            .rtable
            .add(NodeId(1), 3)
            .update(2, 1, Some(NodeId(1)), t(50.0));
        a.handle_link_failure(NodeId(1), t(2.0), &mut rng());
        assert_eq!(a.route(NodeId(1)).unwrap().flag, RouteFlag::Down);
    }
}

mod rt_purge {
    use super::*;

    #[test]
    fn expired_route_sheds_its_buffer_with_no_route_drops() {
        let mut a = agent(0);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 1, Some(NodeId(1)), t(5.0));
        for uid in [1, 2, 3] {
            a.tables_mut().rqueue.enque(NodeId(2), data(uid, 0, 2, 30), t(4.0));
        }
        a.rt_purge(t(5.0)); // inclusive boundary
        let effects = a.take_effects();
        let d = drops(&effects);
        assert_eq!(d.len(), 3);
        assert!(d.iter().all(|(_, r)| *r == DropReason::NoRoute));
        assert_eq!(a.route(NodeId(2)).unwrap().flag, RouteFlag::Down);
    }

    #[test]
    fn live_route_with_waiting_packets_flushes_them() {
        let mut a = agent(0);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 1, Some(NodeId(1)), t(50.0));
        a.tables_mut().rqueue.enque(NodeId(2), data(1, 0, 2, 30), t(4.0));
        a.rt_purge(t(5.0));
        let effects = a.take_effects();
        assert_eq!(transmits(&effects).len(), 1);
        assert!(transmits(&effects)[0].0.is_data());
    }

    #[test]
    fn down_route_with_waiting_packets_restarts_discovery() {
        let mut a = agent(0);
        a.tables_mut().rtable.add(NodeId(2), 3);
        a.tables_mut().rqueue.enque(NodeId(2), data(1, 0, 2, 30), t(4.0));
        a.rt_purge(t(5.0));
        let effects = a.take_effects();
        assert!(matches!(
            transmits(&effects)[0].0.aodv_header(),
            Some(AodvHeader::Request { .. })
        ));
    }

    #[test]
    fn stale_buffered_packets_time_out() {
        let mut a = agent(0);
        a.tables_mut().rtable.add(NodeId(2), 3);
        a.tables_mut().rqueue.enque(NodeId(2), data(1, 0, 2, 30), t(0.0));
        a.rt_purge(t(30.0));
        let effects = a.take_effects();
        assert_eq!(drops(&effects)[0].1, DropReason::QueueTimeout);
    }
}

mod handle_timer {
    use super::*;

    #[test]
    fn cadences_match_the_configured_periods() {
        let mut a = agent(0);
        let mut r = rng();
        a.handle_timer(TimerKind::Broadcast, t(0.0), &mut r);
        a.handle_timer(TimerKind::Neighbor, t(0.0), &mut r);
        a.handle_timer(TimerKind::RouteCache, t(0.0), &mut r);
        let rearms = timers(&a.take_effects());
        assert_eq!(rearms[0], (TimerKind::Broadcast, 6.0));
        assert_eq!(rearms[1], (TimerKind::Neighbor, 1.5));
        assert_eq!(rearms[2], (TimerKind::RouteCache, 0.5));
    }

    #[test]
    fn hello_rearm_stays_inside_the_interval_window() {
        let mut a = agent(0);
        let mut r = rng();
        for _ in 0..10_000 {
            a.handle_timer(TimerKind::Hello, t(0.0), &mut r);
            let effects = a.take_effects();
            let (_, delay) = timers(&effects)[0];
            assert!((0.75..=1.25).contains(&delay), "delay {}", delay);
        }
    }

    #[test]
    fn expired_neighbor_triggers_link_failure_handling() {
        let mut a = agent(0);
        let mut r = rng();
        a.recv(hello(1, 2), Some(NodeId(1)), t(0.0), &mut r);
        a.tables_mut()
            .rtable
            .add(NodeId(2), 3)
            .update(4, 2, Some(NodeId(1)), t(50.0));
        a.take_effects();
        a.handle_timer(TimerKind::Neighbor, t(4.5), &mut r);
        assert!(a.neighbor(NodeId(1)).is_none());
        assert_eq!(a.route(NodeId(2)).unwrap().flag, RouteFlag::Down);
        assert_eq!(a.route(NodeId(1)).unwrap().flag, RouteFlag::Down);
        let effects = a.take_effects();
        assert!(matches!(
            transmits(&effects)[0].0.aodv_header(),
            Some(AodvHeader::Error { .. })
        ));
    }
}
